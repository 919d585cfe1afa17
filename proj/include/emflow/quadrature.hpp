#pragma once

#include <cmath>
#include <vector>

#include "emflow/core.hpp"

namespace emflow {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  int half = (n + 1) / 2;
  for (int k = 0; k < half; ++k) {
    double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[k] = -x;
    nodes[n - 1 - k] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[k] = w;
    weights[n - 1 - k] = w;
  }
}

// Product quadrature grid on S^2: Gauss-Legendre in cos(theta), uniform in
// longitude. Integrates band-limited integrands of degree <= 2 n_lat - 1 in
// cos(theta) exactly.
class SphericalGrid {
 public:
  SphericalGrid(int n_lat, int n_lon, int l_max)
      : n_lat_(n_lat), n_lon_(n_lon), l_max_(l_max) {
    if (n_lat < l_max + 1 || n_lon < 2 * l_max + 1)
      throw ConfigError("grid does not resolve l_max (aliasing)");
    gauss_legendre(n_lat, mu_, wlat_);
    points_.reserve(size_t(n_lat) * n_lon);
    weights_.reserve(size_t(n_lat) * n_lon);
    double wphi = 2.0 * M_PI / n_lon;
    for (int i = 0; i < n_lat; ++i) {
      double mu = mu_[i];
      double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      for (int j = 0; j < n_lon; ++j) {
        double phi = wphi * j;
        Eigen::Vector3d p(s * std::cos(phi), s * std::sin(phi), mu);
        points_.push_back(p);
        weights_.push_back(wlat_[i] * wphi);
      }
    }
  }

  static SphericalGrid standard(int l_max) {
    int nlat = std::max(l_max + 1, 2 * (l_max + 1));
    int nlon = std::max(2 * l_max + 1, 4 * (l_max + 1));
    return SphericalGrid(nlat, nlon, l_max);
  }

  int n_lat() const { return n_lat_; }
  int n_lon() const { return n_lon_; }
  int l_max() const { return l_max_; }
  int size() const { return int(points_.size()); }
  const Eigen::Vector3d& point(int k) const { return points_[k]; }
  double weight(int k) const { return weights_[k]; }

  // integral of a scalar sampled on the grid
  double integrate(const std::vector<double>& samples) const {
    double acc = 0.0;
    for (int k = 0; k < size(); ++k) acc += weights_[k] * samples[k];
    return acc;
  }

  template <typename F>
  double integrate_fn(F f) const {
    double acc = 0.0;
    for (int k = 0; k < size(); ++k) acc += weights_[k] * f(points_[k]);
    return acc;
  }

 private:
  int n_lat_, n_lon_, l_max_;
  std::vector<double> mu_, wlat_;
  std::vector<Eigen::Vector3d> points_;
  std::vector<double> weights_;
};

}  // namespace emflow
