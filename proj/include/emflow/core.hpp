#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace emflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Default tolerances: analytic (closed-form) code paths sit at float64
// round-off, finite-difference paths at O(h^2) truncation.
inline constexpr double kTolAnalytic = 1e-12;
inline constexpr double kTolFiniteDiff = 1e-8;
inline constexpr double kMembershipTolSphere = 1e-12;
inline constexpr double kMembershipTolImplicit = 1e-10;

inline constexpr int kMaxAmbientDim = 4;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidPointError : Error {
  using Error::Error;
};
struct GeometryDegenerateError : Error {
  using Error::Error;
};
struct StepTooLargeError : Error {
  using Error::Error;
};
struct InvalidNormalError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct InstabilityError : Error {
  using Error::Error;
};
struct PathDegenerateError : Error {
  using Error::Error;
};

// Ambient vector with fixed capacity; the first `n` entries are used.
// Templated on the scalar so forward-mode derivative types pass through.
template <typename S>
using AVec = std::array<S, kMaxAmbientDim>;

template <typename S>
AVec<S> avec_zero() {
  return AVec<S>{S(0), S(0), S(0), S(0)};
}

template <typename S>
S avec_dot(const AVec<S>& a, const AVec<S>& b, int n) {
  S r = a[0] * b[0];
  for (int i = 1; i < n; ++i) r = r + a[i] * b[i];
  return r;
}

template <typename S>
AVec<S> avec_add(const AVec<S>& a, const AVec<S>& b, int n) {
  AVec<S> r = avec_zero<S>();
  for (int i = 0; i < n; ++i) r[i] = a[i] + b[i];
  return r;
}

template <typename S>
AVec<S> avec_sub(const AVec<S>& a, const AVec<S>& b, int n) {
  AVec<S> r = avec_zero<S>();
  for (int i = 0; i < n; ++i) r[i] = a[i] - b[i];
  return r;
}

template <typename S, typename T>
AVec<S> avec_scale(const T& c, const AVec<S>& a, int n) {
  AVec<S> r = avec_zero<S>();
  for (int i = 0; i < n; ++i) r[i] = c * a[i];
  return r;
}

template <typename S>
AVec<S> avec_axpy(const S& c, const AVec<S>& x, const AVec<S>& y, int n) {
  AVec<S> r = avec_zero<S>();
  for (int i = 0; i < n; ++i) r[i] = c * x[i] + y[i];
  return r;
}

// 3-d cross product; only valid when n == 3.
template <typename S>
AVec<S> avec_cross3(const AVec<S>& a, const AVec<S>& b) {
  AVec<S> r = avec_zero<S>();
  r[0] = a[1] * b[2] - a[2] * b[1];
  r[1] = a[2] * b[0] - a[0] * b[2];
  r[2] = a[0] * b[1] - a[1] * b[0];
  return r;
}

inline AVec<double> to_avec(const Vec& x) {
  AVec<double> r = avec_zero<double>();
  for (int i = 0; i < x.size(); ++i) r[i] = x[i];
  return r;
}

inline Vec to_vec(const AVec<double>& a, int n) {
  Vec r(n);
  for (int i = 0; i < n; ++i) r[i] = a[i];
  return r;
}

template <typename S>
AVec<S> avec_lift(const AVec<double>& a) {
  AVec<S> r = avec_zero<S>();
  for (int i = 0; i < kMaxAmbientDim; ++i) r[i] = S(a[i]);
  return r;
}

}  // namespace emflow
