#pragma once

#include <algorithm>
#include <complex>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <vector>

#include "emflow/quadrature.hpp"
#include "emflow/sph_harmonics.hpp"
#include "emflow/vector_field.hpp"

namespace emflow {

using Cplx = std::complex<double>;
using CVec3 = std::array<Cplx, 3>;

// Coefficients over the vector spherical harmonic bases on S^2.
//   curl family:  C_lm = (x cross grad Y_lm)/sqrt(l(l+1)),   divergence free
//   grad family:  G_lm = (grad_S Y_lm)/sqrt(l(l+1))
// m >= 0 storage with real-field conjugate symmetry c_{l,-m} = (-1)^m conj.
// grad may be empty, meaning the field is purely divergence free.
struct SpectralField {
  int l_max = 0;
  std::vector<Cplx> curl;
  std::vector<Cplx> grad;
  std::vector<double> curl_stderr;

  static SpectralField zero(int l_max) {
    SpectralField f;
    f.l_max = l_max;
    f.curl.assign(sh_count(l_max), Cplx(0, 0));
    return f;
  }

  Cplx& c(int l, int m) { return curl[sh_index(l, m)]; }
  Cplx c(int l, int m) const { return curl[sh_index(l, m)]; }

  // sum over all m including the conjugate partners
  double norm_sq() const {
    double acc = 0.0;
    for (int l = 1; l <= l_max; ++l) {
      acc += std::norm(curl[sh_index(l, 0)]);
      for (int m = 1; m <= l; ++m) acc += 2.0 * std::norm(curl[sh_index(l, m)]);
      if (!grad.empty()) {
        acc += std::norm(grad[sh_index(l, 0)]);
        for (int m = 1; m <= l; ++m) acc += 2.0 * std::norm(grad[sh_index(l, m)]);
      }
    }
    return acc;
  }
  double energy() const { return 0.5 * norm_sq(); }
  double norm_l2() const { return std::sqrt(norm_sq()); }

  double grad_norm_sq() const {
    if (grad.empty()) return 0.0;
    double acc = 0.0;
    for (int l = 1; l <= l_max; ++l) {
      acc += std::norm(grad[sh_index(l, 0)]);
      for (int m = 1; m <= l; ++m) acc += 2.0 * std::norm(grad[sh_index(l, m)]);
    }
    return acc;
  }

  bool divergence_free(double tol = 1e-10) const {
    return grad_norm_sq() <= tol * tol * std::max(1.0, norm_sq());
  }

  void scale(double s) {
    for (auto& v : curl) v *= s;
    for (auto& v : grad) v *= s;
  }

  void normalize_l2() {
    double n = norm_l2();
    if (n > 0) scale(1.0 / n);
  }
};

inline double rel_l2_error(const SpectralField& a, const SpectralField& b) {
  double num = 0.0, den = 0.0;
  for (int l = 1; l <= std::max(a.l_max, b.l_max); ++l)
    for (int m = 0; m <= l; ++m) {
      Cplx ca = (l <= a.l_max) ? a.curl[sh_index(l, m)] : Cplx(0, 0);
      Cplx cb = (l <= b.l_max) ? b.curl[sh_index(l, m)] : Cplx(0, 0);
      double f = (m == 0) ? 1.0 : 2.0;
      num += f * std::norm(ca - cb);
      den += f * std::norm(cb);
    }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

// ---------------------------------------------------------------------------
// Pointwise evaluation. The harmonics enter through their ambient polynomial
// extensions Yt_lm(y) = Pt_lm(y_3) (y_1 + i y_2)^m, so everything below is
// smooth in the ambient point and valid on forward-mode scalars.

class VshEvaluator {
 public:
  VshEvaluator(const SpectralField& f, std::shared_ptr<const LegendreTables> tables)
      : l_max_(f.l_max), c_(f.curl), tables_(std::move(tables)) {
    l_hi_.assign(l_max_ + 1, -1);
    for (int m = 0; m <= l_max_; ++m)
      for (int l = std::max(1, m); l <= l_max_; ++l)
        if (std::abs(c_[sh_index(l, m)]) > 0.0) l_hi_[m] = l;
  }

  explicit VshEvaluator(const SpectralField& f)
      : VshEvaluator(f, std::make_shared<LegendreTables>(f.l_max)) {}

  // velocity value at an ambient point near S^2
  Eigen::Vector3d value(const Eigen::Vector3d& y) const {
    Cplx g0(0, 0), g1(0, 0), g2(0, 0);
    accumulate_gradient(y, g0, g1, g2);
    Eigen::Vector3d u;
    u[0] = (y[1] * g2 - y[2] * g1).real();
    u[1] = (y[2] * g0 - y[0] * g2).real();
    u[2] = (y[0] * g1 - y[1] * g0).real();
    return u;
  }

  // value and the ambient Jacobian of the extension (for the variational
  // equation of the flow)
  void value_and_jacobian(const Eigen::Vector3d& y, Eigen::Vector3d& u,
                          Eigen::Matrix3d& du) const {
    Cplx g0(0, 0), g1(0, 0), g2(0, 0);
    Cplx h00(0, 0), h01(0, 0), h02(0, 0), h11(0, 0), h12(0, 0), h22(0, 0);
    double z = y[2];
    Cplx w(y[0], y[1]);
    for (int m = 0; m <= l_max_; ++m) {
      if (l_hi_[m] >= 1) {
        Cplx wm = ipow(w, m);
        Cplx wm1 = (m >= 1) ? ipow(w, m - 1) : Cplx(0, 0);
        Cplx wm2 = (m >= 2) ? ipow(w, m - 2) : Cplx(0, 0);
        tables_->recurrence<double>(m, z, [&](int l, const double& p, const double& q,
                                              const double& r) {
          if (l < 1 || l > l_hi_[m]) return;
          Cplx c = c_[sh_index(l, m)];
          if (c == Cplx(0, 0)) return;
          double f = (m == 0) ? 1.0 : 2.0;
          Cplx s = c * (f / std::sqrt(double(l) * (l + 1)));
          Cplx a1 = s * (double(m) * p) * wm1;          // m P wm1
          Cplx a2 = s * (double(m) * (m - 1) * p) * wm2;  // m(m-1) P wm2
          Cplx b1 = s * (double(m) * q) * wm1;          // m P' wm1
          Cplx c0 = s * q * wm;                          // P' wm
          Cplx d0 = s * r * wm;                          // P'' wm
          g0 += a1;
          g1 += Cplx(0, 1) * a1;
          g2 += c0;
          h00 += a2;
          h01 += Cplx(0, 1) * a2;
          h02 += b1;
          h11 -= a2;
          h12 += Cplx(0, 1) * b1;
          h22 += d0;
        });
      }
    }
    u[0] = (y[1] * g2 - y[2] * g1).real();
    u[1] = (y[2] * g0 - y[0] * g2).real();
    u[2] = (y[0] * g1 - y[1] * g0).real();
    // column j of Du: e_j x g + y x (H e_j), real parts
    const Cplx hcol[3][3] = {{h00, h01, h02}, {h01, h11, h12}, {h02, h12, h22}};
    for (int j = 0; j < 3; ++j) {
      Cplx hx = hcol[0][j], hy = hcol[1][j], hz = hcol[2][j];
      Cplx cx = y[1] * hz - y[2] * hy;
      Cplx cy = y[2] * hx - y[0] * hz;
      Cplx cz = y[0] * hy - y[1] * hx;
      Eigen::Vector3d ej = Eigen::Vector3d::Unit(j);
      du(0, j) = (cx).real() + (ej[1] * g2 - ej[2] * g1).real();
      du(1, j) = (cy).real() + (ej[2] * g0 - ej[0] * g2).real();
      du(2, j) = (cz).real() + (ej[0] * g1 - ej[1] * g0).real();
    }
  }

  // scalar-generic value, for the identity suite
  template <typename S>
  AVec<S> value_generic(const AVec<S>& y) const {
    CS<S> g0{S(0), S(0)}, g1{S(0), S(0)}, g2{S(0), S(0)};
    CS<S> w{y[0], y[1]};
    for (int m = 0; m <= l_max_; ++m) {
      if (l_hi_[m] < 1) continue;
      CS<S> wm{S(1), S(0)};
      for (int k = 0; k < m; ++k) wm = cs_mul(wm, w);
      CS<S> wm1{S(0), S(0)};
      if (m >= 1) {
        wm1 = CS<S>{S(1), S(0)};
        for (int k = 0; k + 1 < m; ++k) wm1 = cs_mul(wm1, w);
      }
      tables_->recurrence<S>(m, y[2], [&](int l, const S& p, const S& q, const S&) {
        if (l < 1 || l > l_hi_[m]) return;
        Cplx c = c_[sh_index(l, m)];
        if (c == Cplx(0, 0)) return;
        double f = (m == 0) ? 1.0 : 2.0;
        double sc = f / std::sqrt(double(l) * (l + 1));
        CS<S> cj{S(c.real() * sc), S(c.imag() * sc)};
        if (m >= 1) {
          CS<S> a1 = cs_mul(cj, cs_scale(double(m) * p, wm1));
          g0 = cs_add(g0, a1);
          g1 = cs_add(g1, CS<S>{S(0) - a1.im, a1.re});
        }
        CS<S> c0 = cs_mul(cj, cs_scale(q, wm));
        g2 = cs_add(g2, c0);
      });
    }
    AVec<S> u = avec_zero<S>();
    u[0] = y[1] * g2.re - y[2] * g1.re;
    u[1] = y[2] * g0.re - y[0] * g2.re;
    u[2] = y[0] * g1.re - y[1] * g0.re;
    return u;
  }

  const std::shared_ptr<const LegendreTables>& tables() const { return tables_; }

 private:
  static Cplx ipow(Cplx w, int k) {
    Cplx r(1, 0);
    for (int i = 0; i < k; ++i) r *= w;
    return r;
  }

  // accumulated complex gradient sum over modes (value-only path)
  void accumulate_gradient(const Eigen::Vector3d& y, Cplx& g0, Cplx& g1, Cplx& g2) const {
    double z = y[2];
    Cplx w(y[0], y[1]);
    for (int m = 0; m <= l_max_; ++m) {
      if (l_hi_[m] < 1) continue;
      Cplx wm = ipow(w, m);
      Cplx wm1 = (m >= 1) ? ipow(w, m - 1) : Cplx(0, 0);
      tables_->recurrence<double>(m, z,
                                  [&](int l, const double& p, const double& q, const double&) {
        if (l < 1 || l > l_hi_[m]) return;
        Cplx c = c_[sh_index(l, m)];
        if (c == Cplx(0, 0)) return;
        double f = (m == 0) ? 1.0 : 2.0;
        Cplx s = c * (f / std::sqrt(double(l) * (l + 1)));
        Cplx a1 = s * (double(m) * p) * wm1;
        g0 += a1;
        g1 += Cplx(0, 1) * a1;
        g2 += s * q * wm;
      });
    }
  }

  int l_max_;
  std::vector<Cplx> c_;
  std::shared_ptr<const LegendreTables> tables_;
  std::vector<int> l_hi_;
};

// All curl-family basis values at one point: out[sh_index(l,m)] = C_lm(y).
inline void curl_basis_at(const LegendreTables& t, const Eigen::Vector3d& y,
                          std::vector<CVec3>& out) {
  int l_max = t.l_max();
  out.assign(sh_count(l_max), CVec3{Cplx(0, 0), Cplx(0, 0), Cplx(0, 0)});
  Cplx w(y[0], y[1]);
  for (int m = 0; m <= l_max; ++m) {
    Cplx wm(1, 0), wm1(0, 0);
    for (int k = 0; k < m; ++k) wm *= w;
    if (m >= 1) {
      wm1 = Cplx(1, 0);
      for (int k = 0; k + 1 < m; ++k) wm1 *= w;
    }
    t.recurrence<double>(m, y[2], [&](int l, const double& p, const double& q, const double&) {
      if (l < 1) return;
      double s = 1.0 / std::sqrt(double(l) * (l + 1));
      Cplx g0 = s * double(m) * p * wm1;
      Cplx g1 = Cplx(0, 1) * g0;
      Cplx g2 = s * q * wm;
      out[sh_index(l, m)] = CVec3{y[1] * g2 - y[2] * g1, y[2] * g0 - y[0] * g2,
                                  y[0] * g1 - y[1] * g0};
    });
  }
}

// gradient-family basis values G_lm(y) (tangential projection of grad)
inline void grad_basis_at(const LegendreTables& t, const Eigen::Vector3d& y,
                          std::vector<CVec3>& out) {
  int l_max = t.l_max();
  out.assign(sh_count(l_max), CVec3{Cplx(0, 0), Cplx(0, 0), Cplx(0, 0)});
  Cplx w(y[0], y[1]);
  for (int m = 0; m <= l_max; ++m) {
    Cplx wm(1, 0), wm1(0, 0);
    for (int k = 0; k < m; ++k) wm *= w;
    if (m >= 1) {
      wm1 = Cplx(1, 0);
      for (int k = 0; k + 1 < m; ++k) wm1 *= w;
    }
    t.recurrence<double>(m, y[2], [&](int l, const double& p, const double& q, const double&) {
      if (l < 1) return;
      double s = 1.0 / std::sqrt(double(l) * (l + 1));
      Cplx g[3] = {s * double(m) * p * wm1, Cplx(0, 1) * s * double(m) * p * wm1, s * q * wm};
      Cplx yg = y[0] * g[0] + y[1] * g[1] + y[2] * g[2];
      out[sh_index(l, m)] = CVec3{g[0] - yg * y[0], g[1] - yg * y[1], g[2] - yg * y[2]};
    });
  }
}

// ---------------------------------------------------------------------------
// Transforms.

inline std::vector<Eigen::Vector3d> synthesize(const SphericalGrid& grid,
                                               const SpectralField& f) {
  if (f.l_max > grid.l_max()) throw ConfigError("field l_max exceeds grid resolution");
  auto tables = std::make_shared<LegendreTables>(f.l_max);
  VshEvaluator ev(f, tables);
  std::vector<Eigen::Vector3d> out(grid.size());
  bool has_grad = !f.grad.empty();
  std::vector<CVec3> gb;
  for (int k = 0; k < grid.size(); ++k) {
    out[k] = ev.value(grid.point(k));
    if (has_grad) {
      grad_basis_at(*tables, grid.point(k), gb);
      Eigen::Vector3d add = Eigen::Vector3d::Zero();
      for (int l = 1; l <= f.l_max; ++l)
        for (int m = 0; m <= l; ++m) {
          Cplx c = f.grad[sh_index(l, m)];
          if (c == Cplx(0, 0)) continue;
          double fac = (m == 0) ? 1.0 : 2.0;
          const CVec3& g = gb[sh_index(l, m)];
          for (int j = 0; j < 3; ++j) add[j] += fac * (c * g[j]).real();
        }
      out[k] += add;
    }
  }
  return out;
}

// Analysis of tangent samples into both families (exact for band-limited
// input resolved by the grid).
inline SpectralField analyze(const SphericalGrid& grid,
                             const std::vector<Eigen::Vector3d>& samples) {
  if (int(samples.size()) != grid.size()) throw ConfigError("sample count mismatch");
  int l_max = grid.l_max();
  SpectralField f = SpectralField::zero(l_max);
  f.grad.assign(sh_count(l_max), Cplx(0, 0));
  LegendreTables tables(l_max);
  std::vector<CVec3> cb, gb;
  for (int k = 0; k < grid.size(); ++k) {
    const Eigen::Vector3d& s = samples[k];
    double wq = grid.weight(k);
    curl_basis_at(tables, grid.point(k), cb);
    grad_basis_at(tables, grid.point(k), gb);
    for (int l = 1; l <= l_max; ++l)
      for (int m = 0; m <= l; ++m) {
        int idx = sh_index(l, m);
        Cplx dc(0, 0), dg(0, 0);
        for (int j = 0; j < 3; ++j) {
          dc += s[j] * std::conj(cb[idx][j]);
          dg += s[j] * std::conj(gb[idx][j]);
        }
        f.curl[idx] += wq * dc;
        f.grad[idx] += wq * dg;
      }
  }
  return f;
}

// Leray-Hodge projection: keep the divergence-free (curl) part.
inline SpectralField leray_project(const SpectralField& f) {
  SpectralField out = f;
  out.grad.clear();
  out.grad.shrink_to_fit();
  return out;
}

inline SpectralField leray_project(const SphericalGrid& grid,
                                   const std::vector<Eigen::Vector3d>& samples) {
  return leray_project(analyze(grid, samples));
}

// wrap a spectral field (curl part) as a VectorField for the operator layer
inline VectorField spectral_vector_field(const SpectralField& f) {
  auto ev = std::make_shared<VshEvaluator>(f);
  return VectorField([ev](const auto& y) {
    using S = std::decay_t<decltype(y[0])>;
    return ev->template value_generic<S>(y);
  });
}

// ---------------------------------------------------------------------------
// CSV serialization: family,l,m,re,im,stderr  (m >= 0 rows; negative m follow
// from the real-field conjugate symmetry)

inline void write_csv(const SpectralField& f, const std::string& path,
                      const std::string& run_id = "") {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  if (!run_id.empty()) out << "# run_id=" << run_id << "\n";
  out << "family,l,m,re,im,stderr\n";
  out << std::setprecision(17);
  for (int l = 1; l <= f.l_max; ++l)
    for (int m = 0; m <= l; ++m) {
      int idx = sh_index(l, m);
      double se = idx < int(f.curl_stderr.size()) ? f.curl_stderr[idx] : 0.0;
      out << "curl," << l << "," << m << "," << f.curl[idx].real() << ","
          << f.curl[idx].imag() << "," << se << "\n";
    }
  if (!f.grad.empty())
    for (int l = 1; l <= f.l_max; ++l)
      for (int m = 0; m <= l; ++m) {
        int idx = sh_index(l, m);
        out << "grad," << l << "," << m << "," << f.grad[idx].real() << ","
            << f.grad[idx].imag() << ",0\n";
      }
}

inline SpectralField read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  int l_max = 0;
  struct Row {
    std::string family;
    int l, m;
    double re, im, se;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("family", 0) == 0) continue;
    Row r;
    char fam[16];
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::string f;
    ss >> f >> r.l >> r.m >> r.re >> r.im >> r.se;
    r.family = f;
    rows.push_back(r);
    l_max = std::max(l_max, r.l);
  }
  SpectralField f = SpectralField::zero(l_max);
  f.curl_stderr.assign(sh_count(l_max), 0.0);
  bool any_grad = false;
  for (const auto& r : rows)
    if (r.family == "grad") any_grad = true;
  if (any_grad) f.grad.assign(sh_count(l_max), Cplx(0, 0));
  for (const auto& r : rows) {
    if (r.family == "curl") {
      f.curl[sh_index(r.l, r.m)] = Cplx(r.re, r.im);
      f.curl_stderr[sh_index(r.l, r.m)] = r.se;
    } else {
      f.grad[sh_index(r.l, r.m)] = Cplx(r.re, r.im);
    }
  }
  return f;
}

}  // namespace emflow
