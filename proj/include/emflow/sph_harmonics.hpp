#pragma once

#include <complex>
#include <vector>

#include "emflow/core.hpp"
#include "emflow/jet.hpp"

namespace emflow {

// Coefficient index for m >= 0 storage.
inline int sh_index(int l, int m) { return l * (l + 1) / 2 + m; }
inline int sh_count(int l_max) { return sh_index(l_max, l_max) + 1; }

// Minimal complex-over-scalar so spherical harmonics evaluate on forward-mode
// derivative types as well as on plain doubles.
template <typename S>
struct CS {
  S re{}, im{};
};
template <typename S>
CS<S> cs_mul(const CS<S>& a, const CS<S>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <typename S, typename T>
CS<S> cs_scale(const T& c, const CS<S>& a) {
  return {c * a.re, c * a.im};
}
template <typename S>
CS<S> cs_add(const CS<S>& a, const CS<S>& b) {
  return {a.re + b.re, a.im + b.im};
}

// Fully normalized associated Legendre functions with the (1-z^2)^{m/2}
// factor stripped: Pt_lm(z) = Nlm P_l^m(z) / (1-z^2)^{m/2}, a polynomial in
// z, so that Y_lm(x) = Pt_lm(x3) (x1 + i x2)^m on the unit sphere (Condon-
// Shortley phase included). Stable three-term recurrence with the
// normalization folded into the coefficients.
class LegendreTables {
 public:
  explicit LegendreTables(int l_max) : l_max_(l_max) {
    seed_.assign(l_max + 1, 0.0);
    edge_.assign(l_max + 1, 0.0);
    a_.assign(sh_count(l_max), 0.0);
    b_.assign(sh_count(l_max), 0.0);
    seed_[0] = 1.0 / std::sqrt(4.0 * M_PI);
    for (int m = 1; m <= l_max; ++m)
      seed_[m] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * seed_[m - 1];
    for (int m = 0; m <= l_max; ++m) edge_[m] = std::sqrt(2.0 * m + 3.0);
    for (int m = 0; m <= l_max; ++m)
      for (int l = m + 2; l <= l_max; ++l) {
        double lm = double(l), mm = double(m);
        a_[sh_index(l, m)] = std::sqrt((4.0 * lm * lm - 1.0) / (lm * lm - mm * mm));
        b_[sh_index(l, m)] = std::sqrt(((2.0 * lm + 1.0) * (lm + mm - 1.0) * (lm - mm - 1.0)) /
                                       ((lm - mm) * (lm + mm) * (2.0 * lm - 3.0)));
      }
  }

  int l_max() const { return l_max_; }
  double seed(int m) const { return seed_[m]; }
  double edge(int m) const { return edge_[m]; }
  double a(int l, int m) const { return a_[sh_index(l, m)]; }
  double b(int l, int m) const { return b_[sh_index(l, m)]; }

  // Iterate l = m..l_max at fixed m, calling fn(l, P, P', P'').
  template <typename S, typename F>
  void recurrence(int m, const S& z, F fn) const {
    S p2 = S(0), p1 = S(0), p = S(0);
    S q2 = S(0), q1 = S(0), q = S(0);
    S r2 = S(0), r1 = S(0), r = S(0);
    for (int l = m; l <= l_max_; ++l) {
      if (l == m) {
        p = S(seed_[m]);
        q = S(0);
        r = S(0);
      } else if (l == m + 1) {
        p = edge_[m] * z * p1;
        q = S(edge_[m] * seed_[m]);
        r = S(0);
      } else {
        double al = a(l, m), bl = b(l, m);
        p = al * (z * p1) - bl * p2;
        q = al * (p1 + z * q1) - bl * q2;
        r = al * (2.0 * q1 + z * r1) - bl * r2;
      }
      fn(l, p, q, r);
      p2 = p1; p1 = p;
      q2 = q1; q1 = q;
      r2 = r1; r1 = r;
    }
  }

 private:
  int l_max_;
  std::vector<double> seed_, edge_, a_, b_;
};

// Scalar spherical harmonic Y_lm at an ambient point (unit sphere), complex.
template <typename S>
CS<S> eval_ylm(const LegendreTables& t, int l, int m, const AVec<S>& y) {
  CS<S> w{S(1), S(0)};
  CS<S> xy{y[0], y[1]};
  for (int k = 0; k < m; ++k) w = cs_mul(w, xy);
  CS<S> out{S(0), S(0)};
  t.recurrence(m, y[2], [&](int ll, const S& p, const S&, const S&) {
    if (ll == l) out = cs_scale(p, w);
  });
  return out;
}

}  // namespace emflow
