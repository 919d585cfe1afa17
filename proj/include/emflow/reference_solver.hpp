#pragma once

#include "emflow/spectral_field.hpp"

namespace emflow {

// Pseudo-spectral Galerkin solver for
//   du/dt + P(nabla_u u) + nu box u = 0
// in the divergence-free basis, where box acts diagonally as l(l+1).
// Integrating-factor Heun: the stiff linear part is integrated exactly,
// the projected convection with second order.
class ReferenceSolver {
 public:
  ReferenceSolver(const SphericalGrid& grid, double nu)
      : grid_(grid), nu_(nu), tables_(std::make_shared<LegendreTables>(grid.l_max())) {}

  // coefficients of -P(nabla_u u)
  SpectralField convection_rhs(const SpectralField& u) const {
    VshEvaluator ev(u, tables_);
    SpectralField rhs = SpectralField::zero(grid_.l_max());
    std::vector<CVec3> cb;
    Eigen::Vector3d uv;
    Eigen::Matrix3d du;
    for (int k = 0; k < grid_.size(); ++k) {
      const Eigen::Vector3d& x = grid_.point(k);
      ev.value_and_jacobian(x, uv, du);
      Eigen::Vector3d conv = du * uv;
      conv -= x.dot(conv) * x;  // tangential part of the ambient derivative
      double wq = grid_.weight(k);
      curl_basis_at(*tables_, x, cb);
      for (int l = 1; l <= grid_.l_max(); ++l)
        for (int m = 0; m <= l; ++m) {
          int idx = sh_index(l, m);
          Cplx d(0, 0);
          for (int j = 0; j < 3; ++j) d += conv[j] * std::conj(cb[idx][j]);
          rhs.curl[idx] -= wq * d;
        }
    }
    return rhs;
  }

  SpectralField step(const SpectralField& u, double dt) const {
    int l_max = grid_.l_max();
    if (u.l_max != l_max) throw ConfigError("state l_max does not match solver grid");
    SpectralField k1 = convection_rhs(u);
    SpectralField pred = SpectralField::zero(l_max);
    SpectralField next = SpectralField::zero(l_max);
    for (int l = 1; l <= l_max; ++l) {
      double e = std::exp(-nu_ * double(l) * (l + 1) * dt);
      for (int m = 0; m <= l; ++m) {
        int idx = sh_index(l, m);
        pred.curl[idx] = e * (u.curl[idx] + dt * k1.curl[idx]);
      }
    }
    SpectralField k2 = convection_rhs(pred);
    for (int l = 1; l <= l_max; ++l) {
      double e = std::exp(-nu_ * double(l) * (l + 1) * dt);
      for (int m = 0; m <= l; ++m) {
        int idx = sh_index(l, m);
        next.curl[idx] = e * u.curl[idx] + 0.5 * dt * (e * k1.curl[idx] + k2.curl[idx]);
      }
    }
    check_finite(next);
    return next;
  }

  // integrate over [0, steps*dt], returning the state at every step
  std::vector<SpectralField> run(const SpectralField& u0, double dt, int steps) const {
    std::vector<SpectralField> series;
    series.reserve(steps + 1);
    series.push_back(u0);
    double e0 = u0.energy();
    for (int s = 0; s < steps; ++s) {
      series.push_back(step(series.back(), dt));
      double e = series.back().energy();
      if (!std::isfinite(e) || e > 1e6 * std::max(e0, 1e-30))
        throw InstabilityError("reference solver energy blow-up at step " +
                               std::to_string(s + 1));
    }
    return series;
  }

  double nu() const { return nu_; }
  const SphericalGrid& grid() const { return grid_; }
  const std::shared_ptr<const LegendreTables>& tables() const { return tables_; }

 private:
  static void check_finite(const SpectralField& f) {
    for (const auto& c : f.curl)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw InstabilityError("non-finite spectral coefficient");
  }

  const SphericalGrid& grid_;
  double nu_;
  std::shared_ptr<const LegendreTables> tables_;
};

}  // namespace emflow
