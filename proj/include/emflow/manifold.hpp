#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "emflow/core.hpp"
#include "emflow/jet.hpp"

namespace emflow {

enum class ManifoldKind { Sphere, Implicit };

// Constraint function F for an implicit surface {F = 0} in R^3, with a
// gradient that must not vanish on the zero set.
struct ImplicitConstraint {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

// Compact manifold realized by its ambient embedding: the round sphere
// S^n in R^{n+1} (closed forms) or a codimension-1 implicit surface in R^3
// (finite differences with step fd_step). Tangent vectors live in ambient
// coordinates and all operators act through the projector field Lambda_x.
class Manifold {
 public:
  static Manifold sphere(int n) {
    Manifold m;
    m.kind_ = ManifoldKind::Sphere;
    m.n_ = n;
    m.N_ = n + 1;
    if (n < 2 || m.N_ > kMaxAmbientDim)
      throw ConfigError("sphere dimension must satisfy 2 <= n <= 3");
    m.name_ = "sphere" + std::to_string(n);
    return m;
  }

  static Manifold implicit_surface(ImplicitConstraint c, double fd_step = 1e-5,
                                   std::string name = "implicit") {
    Manifold m;
    m.kind_ = ManifoldKind::Implicit;
    m.n_ = 2;
    m.N_ = 3;
    m.fd_step_ = fd_step;
    m.constraint_ = std::make_shared<ImplicitConstraint>(std::move(c));
    m.name_ = std::move(name);
    return m;
  }

  static Manifold ellipsoid(double a, double b, double c, double fd_step = 1e-5) {
    ImplicitConstraint f;
    f.value = [a, b, c](const Vec& x) {
      return x[0] * x[0] / (a * a) + x[1] * x[1] / (b * b) + x[2] * x[2] / (c * c) - 1.0;
    };
    f.gradient = [a, b, c](const Vec& x) {
      Vec g(3);
      g << 2.0 * x[0] / (a * a), 2.0 * x[1] / (b * b), 2.0 * x[2] / (c * c);
      return g;
    };
    return implicit_surface(std::move(f), fd_step, "ellipsoid");
  }

  ManifoldKind kind() const { return kind_; }
  bool is_sphere() const { return kind_ == ManifoldKind::Sphere; }
  int intrinsic_dim() const { return n_; }
  int ambient_dim() const { return N_; }
  double fd_step() const { return fd_step_; }
  double max_retract_step() const { return max_retract_step_; }
  void set_max_retract_step(double s) { max_retract_step_ = s; }
  const std::string& name() const { return name_; }

  double membership_residual(const Vec& x) const {
    if (is_sphere()) return std::abs(x.norm() - 1.0);
    return std::abs(constraint_->value(x));
  }

  double membership_tol() const {
    return is_sphere() ? kMembershipTolSphere : kMembershipTolImplicit;
  }

  void validate_point(const Vec& x) const {
    if (x.size() != N_) throw InvalidPointError("point has wrong ambient dimension");
    if (membership_residual(x) > membership_tol())
      throw InvalidPointError("point is off the manifold beyond tolerance");
  }

  // Outward unit normal spanning E_x^perp (codimension 1 everywhere here).
  Vec unit_normal(const Vec& x) const {
    if (is_sphere()) return x / x.norm();
    Vec g = constraint_->gradient(x);
    double gn = g.norm();
    if (gn < 1e-12)
      throw GeometryDegenerateError("constraint gradient vanishes at point");
    return g / gn;
  }

  // Orthogonal projector Lambda_x : R^N -> E_x as an ambient matrix.
  Mat projector(const Vec& x) const {
    Vec nu = unit_normal(x);
    return Mat::Identity(N_, N_) - nu * nu.transpose();
  }

  Vec project_raw(const Vec& x, const Vec& xi) const {
    Vec nu = unit_normal(x);
    return xi - nu.dot(xi) * nu;
  }

  // Orthonormal basis of T_xM, deterministic (pivoted Gram-Schmidt over the
  // projected ambient axes).
  Mat tangent_basis(const Vec& x) const {
    Mat cols(N_, N_);
    for (int i = 0; i < N_; ++i) cols.col(i) = project_raw(x, Vec::Unit(N_, i));
    Mat basis(N_, n_);
    int got = 0;
    for (int k = 0; k < n_; ++k) {
      int best = -1;
      double best_norm = 0.0;
      for (int i = 0; i < N_; ++i) {
        double nn = cols.col(i).norm();
        if (nn > best_norm) {
          best_norm = nn;
          best = i;
        }
      }
      if (best < 0 || best_norm < 1e-10)
        throw GeometryDegenerateError("tangent basis construction failed");
      Vec q = cols.col(best) / best_norm;
      basis.col(got++) = q;
      for (int i = 0; i < N_; ++i) cols.col(i) -= q.dot(cols.col(i)) * q;
    }
    return basis;
  }

  // Retraction used by the SDE integrator and by finite-difference curves.
  // Sphere: radial normalization. Implicit: Newton projection along the
  // constraint gradient, at most 8 iterations to |F| <= 1e-10.
  Vec retract(const Vec& x, const Vec& step) const {
    if (step.norm() > max_retract_step_)
      throw StepTooLargeError("retraction step exceeds configured maximum");
    Vec y = x + step;
    if (is_sphere()) {
      double yn = y.norm();
      if (yn < 0.1) throw StepTooLargeError("retraction through the origin");
      return y / yn;
    }
    for (int it = 0; it < 8; ++it) {
      double f = constraint_->value(y);
      if (std::abs(f) <= kMembershipTolImplicit) return y;
      Vec g = constraint_->gradient(y);
      double g2 = g.squaredNorm();
      if (g2 < 1e-20) throw GeometryDegenerateError("degenerate constraint gradient");
      y -= (f / g2) * g;
    }
    if (std::abs(constraint_->value(y)) <= kMembershipTolImplicit) return y;
    throw StepTooLargeError("Newton projection did not converge");
  }

  // Directional derivative of the projector field, d Lambda_x(v) applied
  // to xi. Closed form on the sphere, centered difference along a retracted
  // curve on implicit surfaces.
  Vec d_lambda(const Vec& x, const Vec& v, const Vec& xi) const {
    if (is_sphere()) return -v.dot(xi) * x - x.dot(xi) * v;
    double vn = v.norm();
    if (vn == 0.0) return Vec::Zero(N_);
    Vec vh = v / vn;
    double h = fd_step_;
    Vec xp = retract(x, h * vh);
    Vec xm = retract(x, -h * vh);
    Vec dp = project_raw(xp, xi);
    Vec dm = project_raw(xm, xi);
    return vn * (dp - dm) / (2.0 * h);
  }

  // Second fundamental form alpha_x(u, v) = dLambda_x(u) . v, normal-valued.
  Vec second_fundamental_form(const Vec& x, const Vec& u, const Vec& v) const {
    return d_lambda(x, u, v);
  }

  // Shape operator A(u, V) for a normal vector V at x, defined through the
  // canonical unit-normal field extension; satisfies the duality
  // <alpha(u,w), V> = <A(u,V), w>.
  Vec shape_operator(const Vec& x, const Vec& u, const Vec& v_normal) const {
    double vn = v_normal.norm();
    if (vn > 0.0) {
      Vec tang = project_raw(x, v_normal);
      if (tang.norm() > 1e-8 * std::max(1.0, vn))
        throw InvalidNormalError("shape operator requires a normal vector");
    }
    Vec nu = unit_normal(x);
    double c = nu.dot(v_normal);
    if (c == 0.0) return Vec::Zero(N_);
    Vec dnu;
    if (is_sphere()) {
      dnu = u;  // d/dt of y -> y along any curve with velocity u
    } else {
      double un = u.norm();
      if (un == 0.0) return Vec::Zero(N_);
      Vec uh = u / un;
      double h = fd_step_;
      Vec xp = retract(x, h * uh);
      Vec xm = retract(x, -h * uh);
      dnu = un * (unit_normal(xp) - unit_normal(xm)) / (2.0 * h);
    }
    return -c * project_raw(x, dnu);
  }

  // Trace of alpha over an orthonormal tangent basis; basis independent.
  Vec trace_alpha(const Vec& x) const {
    if (is_sphere()) return -double(n_) * x;
    Mat basis = tangent_basis(x);
    Vec tr = Vec::Zero(N_);
    for (int k = 0; k < n_; ++k)
      tr += second_fundamental_form(x, basis.col(k), basis.col(k));
    return tr;
  }

  // div(A_i) of the frame field A_i = Lambda e_i. Sphere closed form
  // -n <x, e_i>; otherwise the trace of grad(A_i) through d_lambda.
  double frame_divergence(const Vec& x, int i) const {
    if (is_sphere()) return -double(n_) * x[i];
    Mat basis = tangent_basis(x);
    Vec ei = Vec::Unit(N_, i);
    double div = 0.0;
    for (int k = 0; k < n_; ++k)
      div += basis.col(k).dot(d_lambda(x, basis.col(k), ei));
    return div;
  }

 private:
  Manifold() = default;

  ManifoldKind kind_ = ManifoldKind::Sphere;
  int n_ = 2;
  int N_ = 3;
  double fd_step_ = 1e-5;
  double max_retract_step_ = 0.5;
  std::shared_ptr<ImplicitConstraint> constraint_;
  std::string name_ = "sphere2";
};

// ---------------------------------------------------------------------------
// Checked vocabulary types.

struct ManifoldPoint {
  ManifoldPoint(const Manifold& m, Vec coords) : manifold(&m), x(std::move(coords)) {
    m.validate_point(x);
  }
  const Manifold* manifold;
  Vec x;
};

struct TangentVector {
  TangentVector(const ManifoldPoint& p, Vec ambient) : base(p), v(std::move(ambient)) {
    Vec proj = p.manifold->project_raw(p.x, v);
    if ((proj - v).norm() > 1e-10 * std::max(1.0, v.norm()))
      throw InvalidPointError("vector is not tangent at its base point");
  }
  ManifoldPoint base;
  Vec v;
};

struct Frame {
  ManifoldPoint point;
  std::vector<Vec> vectors;  // A_1..A_N
};

inline TangentVector project(const ManifoldPoint& p, const Vec& xi) {
  return TangentVector(p, p.manifold->project_raw(p.x, xi));
}

inline Frame frame_field(const ManifoldPoint& p) {
  Frame f{p, {}};
  int N = p.manifold->ambient_dim();
  f.vectors.reserve(N);
  for (int i = 0; i < N; ++i)
    f.vectors.push_back(p.manifold->project_raw(p.x, Vec::Unit(N, i)));
  return f;
}

// ---------------------------------------------------------------------------
// Scalar-generic sphere helpers for the forward-mode derivative machinery.
// Points move along the on-sphere curve t -> (x + t v)/|x + t v|, which has
// velocity v at t = 0 for tangent v and is smooth in v including v = 0.

template <typename S>
AVec<S> sphere_normalize(const AVec<S>& y, int N) {
  S n2 = avec_dot(y, y, N);
  S inv = S(1) / sqrt(n2);
  return avec_scale(inv, y, N);
}

template <typename S>
AVec<S> sphere_project(const AVec<S>& x, const AVec<S>& xi, int N) {
  S c = avec_dot(x, xi, N);
  AVec<S> r = avec_zero<S>();
  for (int i = 0; i < N; ++i) r[i] = xi[i] - c * x[i];
  return r;
}

// curve point with the curve parameter promoted one jet level
template <typename S>
AVec<Jet<S>> sphere_curve_jet(const AVec<S>& x, const AVec<S>& v, int N) {
  Jet<S> t{S(0), S(1)};
  AVec<Jet<S>> y = avec_zero<Jet<S>>();
  for (int i = 0; i < N; ++i) y[i] = Jet<S>(x[i]) + t * Jet<S>(v[i]);
  return sphere_normalize(y, N);
}

}  // namespace emflow
