#pragma once

#include "emflow/manifold.hpp"
#include "emflow/vector_field.hpp"

namespace emflow {

// Outer step for differentiating composed (already differentiated) fields
// numerically; balances truncation against cancellation of the inner step.
inline constexpr double kOuterFdStep = 1e-4;

namespace detail {

// Scalar-generic covariant derivative on the sphere: project the curve
// derivative of B along t -> (x + t v)/|x + t v|.
template <typename S>
AVec<S> covariant_sphere(const Manifold& m, const VectorField& B, const AVec<S>& x,
                         const AVec<S>& v) {
  int N = m.ambient_dim();
  AVec<Jet<S>> y = sphere_curve_jet(x, v, N);
  AVec<Jet<S>> bv = B.eval(y);
  AVec<S> db = avec_zero<S>();
  for (int i = 0; i < N; ++i) db[i] = bv[i].d;
  return sphere_project(x, db, N);
}

inline double fd_step_for(const Manifold& m, const VectorField& B) {
  return B.fd_hint() > 0.0 ? B.fd_hint() : m.fd_step();
}

}  // namespace detail

// Levi-Civita covariant derivative nabla_v B at x. Analytic (forward-mode)
// on the sphere when the field supports it, centered differences along
// retracted curves otherwise.
inline Vec covariant_derivative(const Manifold& m, const VectorField& B, const Vec& x,
                                const Vec& v) {
  int N = m.ambient_dim();
  if (m.is_sphere() && B.has_level(1))
    return to_vec(detail::covariant_sphere<double>(m, B, to_avec(x), to_avec(v)), N);
  double vn = v.norm();
  if (vn == 0.0) return Vec::Zero(N);
  Vec vh = v / vn;
  double h = detail::fd_step_for(m, B);
  Vec bp = B(m, m.retract(x, h * vh));
  Vec bm = B(m, m.retract(x, -h * vh));
  return m.project_raw(x, vn * (bp - bm) / (2.0 * h));
}

namespace detail {

template <typename S>
AVec<S> lie_sphere(const Manifold& m, const VectorField& V, const VectorField& B,
                   const AVec<S>& x) {
  AVec<S> vv = V.eval(x);
  AVec<S> bb = B.eval(x);
  AVec<S> a = covariant_sphere(m, B, x, vv);
  AVec<S> b = covariant_sphere(m, V, x, bb);
  return avec_sub(a, b, m.ambient_dim());
}

}  // namespace detail

// Lie derivative L_V B = nabla_V B - nabla_B V.
inline Vec lie_derivative(const Manifold& m, const VectorField& V, const VectorField& B,
                          const Vec& x) {
  Vec vv = V(m, x);
  Vec bb = B(m, x);
  return covariant_derivative(m, B, x, vv) - covariant_derivative(m, V, x, bb);
}

// L_V B as a field, for nesting. Keeps one analytic derivative level when
// both inputs carry two.
inline VectorField lie_field(const Manifold& m, const VectorField& V, const VectorField& B) {
  const Manifold* mp = &m;
  VectorField::Eval0 f0 = [mp, V, B](const AVec<double>& y) {
    return to_avec(lie_derivative(*mp, V, B, to_vec(y, mp->ambient_dim())));
  };
  if (m.is_sphere() && V.has_level(2) && B.has_level(2)) {
    VectorField::Eval1 f1 = [mp, V, B](const AVec<J1>& y) {
      return detail::lie_sphere<J1>(*mp, V, B, y);
    };
    return VectorField(std::move(f0), std::move(f1));
  }
  return VectorField(VectorField::NumericTag{}, std::move(f0), kOuterFdStep);
}

// nabla_{A} B as a field (A evaluated pointwise), for the Bochner sum.
inline VectorField covariant_field(const Manifold& m, const VectorField& A,
                                   const VectorField& B) {
  const Manifold* mp = &m;
  VectorField::Eval0 f0 = [mp, A, B](const AVec<double>& y) {
    Vec x = to_vec(y, mp->ambient_dim());
    return to_avec(covariant_derivative(*mp, B, x, A(*mp, x)));
  };
  if (m.is_sphere() && A.has_level(1) && B.has_level(2)) {
    VectorField::Eval1 f1 = [mp, A, B](const AVec<J1>& y) {
      return detail::covariant_sphere<J1>(*mp, B, y, A.eval(y));
    };
    return VectorField(std::move(f0), std::move(f1));
  }
  return VectorField(VectorField::NumericTag{}, std::move(f0), kOuterFdStep);
}

namespace detail {

// divergence as the frame trace sum_i <nabla_{A_i} B, e_i>; smooth in the
// point, so it can be differentiated one more level for grad(div).
template <typename S>
S div_sphere(const Manifold& m, const VectorField& B, const AVec<S>& x) {
  int N = m.ambient_dim();
  S acc = S(0);
  for (int i = 0; i < N; ++i) {
    AVec<S> ei = avec_zero<S>();
    ei[i] = S(1);
    AVec<S> ai = sphere_project(x, ei, N);
    AVec<S> d = covariant_sphere(m, B, x, ai);
    acc = acc + d[i];
  }
  return acc;
}

}  // namespace detail

// div(B)(x), the trace of nabla B over the tangent space.
inline double divergence(const Manifold& m, const VectorField& B, const Vec& x) {
  if (m.is_sphere() && B.has_level(1)) return detail::div_sphere<double>(m, B, to_avec(x));
  Mat basis = m.tangent_basis(x);
  double acc = 0.0;
  for (int k = 0; k < m.intrinsic_dim(); ++k)
    acc += basis.col(k).dot(covariant_derivative(m, B, x, basis.col(k)));
  return acc;
}

// divergence of B = (dJ)* xi through Trace(alpha); the dual route used by
// the identity suite.
inline double divergence_via_trace_alpha(const Manifold& m, const Vec& x, const Vec& xi) {
  return m.trace_alpha(x).dot(xi);
}

// gradient of div(B) as a tangent vector
inline Vec nabla_divergence(const Manifold& m, const VectorField& B, const Vec& x) {
  int N = m.ambient_dim();
  Mat basis = m.tangent_basis(x);
  Vec g = Vec::Zero(N);
  if (m.is_sphere() && B.has_level(2)) {
    for (int k = 0; k < m.intrinsic_dim(); ++k) {
      AVec<J1> y = sphere_curve_jet<double>(to_avec(x), to_avec(Vec(basis.col(k))),
                                            N);
      J1 dv = detail::div_sphere<J1>(m, B, y);
      g += dv.d * basis.col(k);
    }
    return g;
  }
  double h = kOuterFdStep;
  for (int k = 0; k < m.intrinsic_dim(); ++k) {
    Vec vk = basis.col(k);
    double dp = divergence(m, B, m.retract(x, h * vk));
    double dm = divergence(m, B, m.retract(x, -h * vk));
    g += ((dp - dm) / (2.0 * h)) * vk;
  }
  return g;
}

// Symmetric (0,2)-tensor on the tangent space, stored as an ambient matrix
// annihilating normals.
struct SymmetricTwoTensor {
  Vec x;
  Mat mat;  // N x N, kernel contains E_x^perp

  double frobenius_sq() const { return mat.squaredNorm(); }
  double trace() const { return mat.trace(); }
};

// Def(B)(X,Y) = (<nabla_X B, Y> + <nabla_Y B, X>)/2.
inline SymmetricTwoTensor deformation_tensor(const Manifold& m, const VectorField& B,
                                             const Vec& x) {
  int n = m.intrinsic_dim();
  Mat basis = m.tangent_basis(x);
  Mat g(n, n);
  for (int k = 0; k < n; ++k) {
    Vec d = covariant_derivative(m, B, x, basis.col(k));
    for (int j = 0; j < n; ++j) g(k, j) = basis.col(j).dot(d);
  }
  Mat sym = 0.5 * (g + g.transpose());
  return {x, basis * sym * basis.transpose()};
}

// T1(B) = sum_i div(A_i) L_{A_i} B over the embedding frame.
inline Vec tensor_t1_frame(const Manifold& m, const VectorField& B, const Vec& x) {
  int N = m.ambient_dim();
  Vec acc = Vec::Zero(N);
  for (int i = 0; i < N; ++i) {
    double di = m.frame_divergence(x, i);
    if (di == 0.0) continue;
    acc += di * lie_derivative(m, frame_vector_field(m, i), B, x);
  }
  return acc;
}

// T1(B) = -A(B, Trace(alpha)), the embedding form.
inline Vec tensor_t1_embedding(const Manifold& m, const VectorField& B, const Vec& x) {
  return -m.shape_operator(x, B(m, x), m.trace_alpha(x));
}

// default route: closed form -n B on S^n, embedding form elsewhere
inline Vec tensor_t1(const Manifold& m, const VectorField& B, const Vec& x) {
  if (m.is_sphere()) return -double(m.intrinsic_dim()) * B(m, x);
  return tensor_t1_embedding(m, B, x);
}

// psi(B, W) = sum_k <alpha(B, v_k), alpha(W, v_k)>
inline double psi_form(const Manifold& m, const Vec& x, const Vec& b, const Vec& w) {
  Mat basis = m.tangent_basis(x);
  double acc = 0.0;
  for (int k = 0; k < m.intrinsic_dim(); ++k) {
    Vec ab = m.second_fundamental_form(x, b, basis.col(k));
    Vec aw = m.second_fundamental_form(x, w, basis.col(k));
    acc += ab.dot(aw);
  }
  return acc;
}

// T2 through psi over an orthonormal tangent basis.
inline Vec tensor_t2_general(const Manifold& m, const VectorField& B, const Vec& x) {
  Mat basis = m.tangent_basis(x);
  Vec b = B(m, x);
  Vec acc = Vec::Zero(m.ambient_dim());
  for (int k = 0; k < m.intrinsic_dim(); ++k)
    acc += psi_form(m, x, b, basis.col(k)) * basis.col(k);
  return acc;
}

// default route: identity on S^n
inline Vec tensor_t2(const Manifold& m, const VectorField& B, const Vec& x) {
  if (m.is_sphere()) return B(m, x);
  return tensor_t2_general(m, B, x);
}

// Ric(B) = -T1(B) - T2(B); (n-1) B on S^n.
inline Vec ricci(const Manifold& m, const VectorField& B, const Vec& x) {
  if (m.is_sphere()) return double(m.intrinsic_dim() - 1) * B(m, x);
  return -tensor_t1_embedding(m, B, x) - tensor_t2_general(m, B, x);
}

// Independent cross-route: the Gauss equation contracted over the frame,
// <Ric(B), W> = <Trace(alpha), alpha(B, W)> - psi(B, W), built from alpha
// evaluations only.
inline Vec ricci_curvature_route(const Manifold& m, const VectorField& B, const Vec& x) {
  Mat basis = m.tangent_basis(x);
  Vec tr = m.trace_alpha(x);
  Vec b = B(m, x);
  Vec acc = Vec::Zero(m.ambient_dim());
  for (int j = 0; j < m.intrinsic_dim(); ++j) {
    Vec w = basis.col(j);
    double cj = tr.dot(m.second_fundamental_form(x, b, w)) - psi_form(m, x, b, w);
    acc += cj * w;
  }
  return acc;
}

// frame Laplacian sum_i L_{A_i}^2 B
inline Vec frame_laplacian(const Manifold& m, const VectorField& B, const Vec& x) {
  int N = m.ambient_dim();
  Vec acc = Vec::Zero(N);
  for (int i = 0; i < N; ++i) {
    VectorField ai = frame_vector_field(m, i);
    acc += lie_derivative(m, ai, lie_field(m, ai, B), x);
  }
  return acc;
}

// Bochner Laplacian Trace(nabla^2 B) = sum_i nabla_{A_i} nabla_{A_i} B,
// valid because sum_i nabla_{A_i} A_i = 0 for the embedding frame.
inline Vec bochner_laplacian(const Manifold& m, const VectorField& B, const Vec& x) {
  int N = m.ambient_dim();
  Vec acc = Vec::Zero(N);
  for (int i = 0; i < N; ++i) {
    VectorField ai = frame_vector_field(m, i);
    acc += covariant_derivative(m, covariant_field(m, ai, B), x, ai(m, x));
  }
  return acc;
}

// de Rham-Hodge Laplacian, primary route: box B = -sum_i L_{A_i}^2 B - 2 T1(B)
inline Vec hodge_laplacian(const Manifold& m, const VectorField& B, const Vec& x) {
  return -frame_laplacian(m, B, x) - 2.0 * tensor_t1(m, B, x);
}

// verification route via Bochner-Weitzenboeck: box = -Delta + Ric
inline Vec hodge_laplacian_weitzenbock(const Manifold& m, const VectorField& B, const Vec& x) {
  return -bochner_laplacian(m, B, x) + ricci(m, B, x);
}

// Ebin-Marsden Laplacian: hat-box B = -Delta B - Ric(B) - grad div(B)
inline Vec ebin_laplacian(const Manifold& m, const VectorField& B, const Vec& x) {
  return -bochner_laplacian(m, B, x) - ricci(m, B, x) - nabla_divergence(m, B, x);
}

// divergence-free route: hat-box B = -sum_i L_{A_i}^2 B + 2 T2(B)
inline Vec ebin_laplacian_divfree(const Manifold& m, const VectorField& B, const Vec& x) {
  double db = divergence(m, B, x);
  if (std::abs(db) > 1e-6)
    throw PreconditionError("divergence-free route called on a field with div != 0");
  return -frame_laplacian(m, B, x) + 2.0 * tensor_t2(m, B, x);
}

}  // namespace emflow
