#pragma once

#include <cmath>

namespace emflow {

// First-order truncated Taylor scalar (dual number) for forward-mode
// differentiation along a single curve parameter. Nesting Jet<Jet<double>>
// yields exact mixed second derivatives for the nested Lie/covariant
// derivative machinery; no finite-difference truncation error.
template <typename T>
struct Jet {
  T v{};  // value
  T d{};  // derivative w.r.t. this level's parameter

  Jet() = default;
  Jet(const T& value) : v(value), d(T(0)) {}  // NOLINT: implicit by design
  Jet(const T& value, const T& deriv) : v(value), d(deriv) {}

  // allow Jet<Jet<double>> j2 = 1.5;
  template <typename U>
  Jet(const U& value)  // NOLINT
      : v(T(value)), d(T(0)) {}
};

using J1 = Jet<double>;
using J2 = Jet<Jet<double>>;

template <typename T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <typename T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <typename T>
Jet<T> operator-(const Jet<T>& a) {
  return {-a.v, -a.d};
}
template <typename T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v};
}
template <typename T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  T inv = T(1) / b.v;
  T q = a.v * inv;
  return {q, (a.d - q * b.d) * inv};
}

template <typename T>
Jet<T> operator+(const Jet<T>& a, double b) {
  return {a.v + T(b), a.d};
}
template <typename T>
Jet<T> operator+(double a, const Jet<T>& b) {
  return b + a;
}
template <typename T>
Jet<T> operator-(const Jet<T>& a, double b) {
  return {a.v - T(b), a.d};
}
template <typename T>
Jet<T> operator-(double a, const Jet<T>& b) {
  return {T(a) - b.v, -b.d};
}
template <typename T>
Jet<T> operator*(const Jet<T>& a, double b) {
  return {a.v * T(b), a.d * T(b)};
}
template <typename T>
Jet<T> operator*(double a, const Jet<T>& b) {
  return b * a;
}
template <typename T>
Jet<T> operator/(const Jet<T>& a, double b) {
  return a * (1.0 / b);
}
template <typename T>
Jet<T> operator/(double a, const Jet<T>& b) {
  return Jet<T>(T(a)) / b;
}

using std::cos;
using std::exp;
using std::sin;
using std::sqrt;

template <typename T>
Jet<T> sqrt(const Jet<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <typename T>
Jet<T> sin(const Jet<T>& a) {
  return {sin(a.v), cos(a.v) * a.d};
}
template <typename T>
Jet<T> cos(const Jet<T>& a) {
  return {cos(a.v), -sin(a.v) * a.d};
}
template <typename T>
Jet<T> exp(const Jet<T>& a) {
  T e = exp(a.v);
  return {e, e * a.d};
}

// strip all derivative parts
inline double jet_value(double x) { return x; }
template <typename T>
double jet_value(const Jet<T>& x) {
  return jet_value(x.v);
}

template <typename S>
struct JetLevel {
  static constexpr int value = 0;
};
template <typename T>
struct JetLevel<Jet<T>> {
  static constexpr int value = 1 + JetLevel<T>::value;
};

}  // namespace emflow
