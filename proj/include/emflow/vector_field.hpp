#pragma once

#include <functional>
#include <type_traits>
#include <utility>

#include "emflow/manifold.hpp"

namespace emflow {

// A vector field on M, evaluated in ambient coordinates. The evaluator must
// return a vector tangent to M whenever the input point lies on M; off the
// manifold it is an arbitrary smooth extension (only on-manifold derivatives
// are ever used). Fields constructed from a scalar-generic callable carry
// forward-mode evaluators so covariant and Lie derivatives on the sphere are
// exact; fields with only a plain evaluator fall back to finite differences.
class VectorField {
 public:
  using Eval0 = std::function<AVec<double>(const AVec<double>&)>;
  using Eval1 = std::function<AVec<J1>(const AVec<J1>&)>;
  using Eval2 = std::function<AVec<J2>(const AVec<J2>&)>;

  VectorField() = default;

  template <typename F,
            typename = std::enable_if_t<std::is_invocable_v<F, const AVec<J2>&>>>
  explicit VectorField(F f)
      : e0_(f), e1_(f), e2_(f) {}

  // plain double-only field; derivatives will use finite differences
  struct NumericTag {};
  VectorField(NumericTag, Eval0 f, double fd_hint = 0.0)
      : e0_(std::move(f)), fd_hint_(fd_hint) {}

  // composed field supporting one further analytic derivative level
  VectorField(Eval0 f0, Eval1 f1, double fd_hint = 0.0)
      : e0_(std::move(f0)), e1_(std::move(f1)), fd_hint_(fd_hint) {}

  bool has_level(int k) const {
    if (k <= 0) return bool(e0_);
    if (k == 1) return bool(e1_);
    return bool(e2_);
  }

  template <typename S>
  AVec<S> eval(const AVec<S>& y) const {
    constexpr int level = JetLevel<S>::value;
    if constexpr (level == 0) {
      return e0_(y);
    } else if constexpr (level == 1) {
      if (!e1_) throw Error("vector field has no first-order analytic evaluator");
      return e1_(y);
    } else {
      static_assert(level == 2, "at most two analytic derivative levels");
      if (!e2_) throw Error("vector field has no second-order analytic evaluator");
      return e2_(y);
    }
  }

  Vec operator()(const Manifold& m, const Vec& x) const {
    AVec<double> r = e0_(to_avec(x));
    return to_vec(r, m.ambient_dim());
  }

  // finite-difference step this field prefers when differentiated numerically
  // (composed fields report a coarser outer step)
  double fd_hint() const { return fd_hint_; }

 private:
  Eval0 e0_;
  Eval1 e1_;
  Eval2 e2_;
  double fd_hint_ = 0.0;
};

// ---------------------------------------------------------------------------
// Stock fields.

// frame field A_i(y) = e_i - <y, e_i> y on the sphere (ambient extension as
// in the closed-form projector), numeric projection elsewhere
inline VectorField frame_vector_field(const Manifold& m, int i) {
  int N = m.ambient_dim();
  if (m.is_sphere()) {
    return VectorField([i, N](const auto& y) {
      using S = std::decay_t<decltype(y[0])>;
      AVec<S> r = avec_zero<S>();
      S c = y[i];
      for (int j = 0; j < N; ++j) r[j] = S(0) - c * y[j];
      r[i] = r[i] + 1.0;
      return r;
    });
  }
  return VectorField(VectorField::NumericTag{}, [&m, i, N](const AVec<double>& ya) {
    Vec y = to_vec(ya, N);
    return to_avec(m.project_raw(y, Vec::Unit(N, i)));
  });
}

// rotation (Killing) field y -> a x y on S^2
inline VectorField rotation_field(const Vec& axis) {
  AVec<double> a = to_avec(axis);
  return VectorField([a](const auto& y) {
    using S = std::decay_t<decltype(y[0])>;
    return avec_cross3(avec_lift<S>(a), y);
  });
}

// tangential projection of a constant ambient vector, B = Lambda xi
inline VectorField projected_constant_field(const Manifold& m, const Vec& xi) {
  int N = m.ambient_dim();
  AVec<double> c = to_avec(xi);
  if (m.is_sphere()) {
    return VectorField([c, N](const auto& y) {
      using S = std::decay_t<decltype(y[0])>;
      return sphere_project(sphere_normalize(y, N), avec_lift<S>(c), N);
    });
  }
  return VectorField(VectorField::NumericTag{}, [&m, c, N](const AVec<double>& ya) {
    Vec y = to_vec(ya, N);
    return to_avec(m.project_raw(y, to_vec(c, N)));
  });
}

// Tangential projection of a random polynomial ambient map of degree <= 2:
// p(y) = b + L y + (y^T Q_k y)_k. Smooth, band-limited test fields on any of
// the supported manifolds.
struct PolynomialSpec {
  AVec<double> constant = avec_zero<double>();
  std::array<AVec<double>, kMaxAmbientDim> linear{};   // rows of L
  std::array<std::array<AVec<double>, kMaxAmbientDim>, kMaxAmbientDim> quad{};  // Q_k rows
};

template <typename S>
AVec<S> eval_polynomial(const PolynomialSpec& p, const AVec<S>& y, int N) {
  AVec<S> r = avec_zero<S>();
  for (int k = 0; k < N; ++k) {
    S acc = S(p.constant[k]);
    for (int i = 0; i < N; ++i) {
      acc = acc + p.linear[k][i] * y[i];
      S row = S(0);
      for (int j = 0; j < N; ++j) row = row + p.quad[k][i][j] * y[j];
      acc = acc + y[i] * row;
    }
    r[k] = acc;
  }
  return r;
}

inline VectorField projected_polynomial_field(const Manifold& m, const PolynomialSpec& p) {
  int N = m.ambient_dim();
  if (m.is_sphere()) {
    return VectorField([p, N](const auto& y) {
      using S = std::decay_t<decltype(y[0])>;
      AVec<S> yn = sphere_normalize(y, N);
      return sphere_project(yn, eval_polynomial(p, y, N), N);
    });
  }
  return VectorField(VectorField::NumericTag{}, [&m, p, N](const AVec<double>& ya) {
    Vec y = to_vec(ya, N);
    return to_avec(m.project_raw(y, to_vec(eval_polynomial(p, ya, N), N)));
  });
}

// Divergence-free field on an implicit 2-surface: B = nu x grad_S f for a
// scalar f with analytic ambient gradient. Surface rotationals of functions
// are divergence free on any oriented surface.
inline VectorField surface_rotational_field(const Manifold& m,
                                            std::function<Vec(const Vec&)> grad_f) {
  int N = m.ambient_dim();
  return VectorField(VectorField::NumericTag{},
                     [&m, grad_f = std::move(grad_f), N](const AVec<double>& ya) {
                       Vec y = to_vec(ya, N);
                       Vec nu = m.unit_normal(y);
                       Vec gs = m.project_raw(y, grad_f(y));
                       Vec r(3);
                       r[0] = nu[1] * gs[2] - nu[2] * gs[1];
                       r[1] = nu[2] * gs[0] - nu[0] * gs[2];
                       r[2] = nu[0] * gs[1] - nu[1] * gs[0];
                       return to_avec(r);
                     });
}

// pointwise multiplication by a smooth scalar function (tensoriality tests)
template <typename G>
VectorField scaled_field(const VectorField& b, G g) {
  return VectorField(
      [b, g](const AVec<double>& y) { return avec_scale(g(y), b.eval(y), kMaxAmbientDim); },
      [b, g](const AVec<J1>& y) { return avec_scale(g(y), b.eval(y), kMaxAmbientDim); });
}

}  // namespace emflow
