// Sampled warped-product profiles, proper-distance parametrization of the
// model metrics, profile export, and the CSV interchange format.
#ifndef KOTTLER_PROFILE_HPP_
#define KOTTLER_PROFILE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kottler/models.hpp"

namespace kottler {

enum class Chart { AreaRadius, ProperDistance };

struct ProfileFormatError : std::runtime_error {
  int line;  // 1-based offending line, 0 if structural
  ProfileFormatError(const std::string& what, int line_) : std::runtime_error(what), line(line_) {}
};

struct WarpedProfile {
  int n = 3;
  Chart chart = Chart::ProperDistance;
  std::vector<double> coord;  // strictly increasing sample grid
  std::vector<double> u;      // potential samples
  std::vector<double> warp;   // warping function samples b
  std::vector<double> du;     // optional |Du| samples (closed form on model exports)
  double fiber_einstein_constant = 1.0;
  double fiber_area_normalization = 4.0 * kPi;
  std::optional<ModelParams> params;  // set on model exports
  bool cylindrical = false;           // Nariai-type export

  size_t size() const { return coord.size(); }
  double spacing() const { return (coord.back() - coord.front()) / double(size() - 1); }

  void validate() const {
    size_t N = coord.size();
    if (N < 16) throw ProfileFormatError("profile requires at least 16 samples", 0);
    if (u.size() != N || warp.size() != N || (!du.empty() && du.size() != N))
      throw ProfileFormatError("profile column length mismatch", 0);
    for (size_t i = 0; i + 1 < N; ++i)
      if (!(coord[i + 1] > coord[i]))
        throw ProfileFormatError("profile coordinate grid not strictly increasing", int(i + 2));
    for (size_t i = 0; i < N; ++i) {
      if (!std::isfinite(coord[i]) || !std::isfinite(u[i]) || !std::isfinite(warp[i]))
        throw ProfileFormatError("profile contains a non-finite sample", int(i + 2));
      if (u[i] < 0.0) throw ProfileFormatError("profile potential must be nonnegative", int(i + 2));
      if (u[i] == 0.0 && i != 0 && i != N - 1)
        throw ProfileFormatError("profile potential vanishes away from the endpoints", int(i + 2));
      if (warp[i] <= 0.0 && i != 0 && i != N - 1)
        throw ProfileFormatError("profile warping must be positive in the interior", int(i + 2));
    }
  }
};

// Proper-distance parametrization s(r) = int dr / sqrt(f_m) over [r_lo, r_hi].
// The substitution r = rc - R cos(theta) removes the 1/sqrt(f) horizon
// singularities exactly: with P_m(r) = (r - r_-)(r_+ - r) Q(r) the integrand
// becomes sqrt(r^{n-2}/Q(r)) (SdS), or sqrt(2R) sin(theta/2)/sqrt(1+r) (m=0),
// which is smooth on [0, pi].
class ProperLengthMap {
 public:
  explicit ProperLengthMap(const ModelParams& p,
                           const ToleranceConfig& tol = ToleranceConfig::defaults())
      : p_(p) {
    if (p.at_m_max())
      throw std::domain_error("ProperLengthMap: Nariai chart is handled in closed form");
    if (p.m == 0.0) {
      r_lo_ = 0.0; r_hi_ = 1.0;
    } else {
      auto [rm, rp] = horizon_radii(p, tol);
      r_lo_ = rm; r_hi_ = rp;
    }
    rc_ = 0.5 * (r_lo_ + r_hi_);
    R_ = 0.5 * (r_hi_ - r_lo_);
    if (p.m > 0.0) build_cofactor();
    build_table();
  }

  double r_lo() const { return r_lo_; }
  double r_hi() const { return r_hi_; }
  double total_length() const { return s_.back(); }

  double r_of_theta(double th) const { return rc_ - R_ * std::cos(th); }

  // Smooth integrand ds/dtheta.
  double g(double th) const {
    double r = r_of_theta(th);
    if (p_.m == 0.0) return std::sqrt(2.0 * R_) * std::sin(0.5 * th) / std::sqrt(1.0 + r);
    return std::sqrt(std::pow(r, p_.n - 2) / Q(r));
  }

  double s_of_theta(double th) const {
    if (th <= 0.0) return 0.0;
    if (th >= kPi) return s_.back();
    double x = th / h_;
    size_t i = std::min(size_t(x), s_.size() - 2);
    double a = h_ * double(i);
    // Local Simpson from the cached cell boundary.
    double m = 0.5 * (a + th);
    return s_[i] + (th - a) / 6.0 * (g(a) + 4.0 * g(m) + g(th));
  }

  double theta_of_r(double r) const {
    return std::acos(-std::clamp((r - rc_) / R_, -1.0, 1.0));
  }

  double s_of_r(double r) const { return s_of_theta(theta_of_r(r)); }

  double theta_of_s(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= s_.back()) return kPi;
    size_t i = size_t(std::lower_bound(s_.begin(), s_.end(), s) - s_.begin());
    if (i > 0) --i;
    double th = h_ * (double(i) + 0.5);
    for (int it = 0; it < 60; ++it) {
      double ds = s_of_theta(th) - s;
      double d = g(th);
      double step = (d > 1e-14) ? ds / d : ds;
      th -= step;
      th = std::clamp(th, 0.0, kPi);
      if (std::abs(step) < 1e-15 * kPi) break;
    }
    return th;
  }

  double r_of_s(double s) const { return r_of_theta(theta_of_s(s)); }

  // sqrt(f) evaluated through the deflated product form
  // f = (r - r_-)(r_+ - r) Q(r) / r^{n-2}, which is free of the horizon
  // cancellation: (r - r_-)(r_+ - r) = R^2 sin^2(theta).
  double u_of_theta(double th) const {
    double r = r_of_theta(th);
    if (p_.m == 0.0) return std::cos(0.5 * th) * std::sqrt(1.0 + r);
    return R_ * std::sin(th) * std::sqrt(Q(r) / std::pow(r, p_.n - 2));
  }

 private:
  // P_m(r) / ((r - r_-)(r_+ - r)), positive on [r_-, r_+].  Evaluating the
  // quotient directly is catastrophically ill-conditioned near the horizons
  // (0/0), so the polynomial is deflated by both roots up front (synthetic
  // division) and Q is a plain Horner evaluation of the smooth cofactor.
  double Q(double r) const {
    double acc = 0.0;
    for (auto it = q_.rbegin(); it != q_.rend(); ++it) acc = acc * r + *it;
    return acc;
  }

  void build_cofactor() {
    // P(r) = -r^n + r^{n-2} - 2m, coefficients in ascending order.
    std::vector<double> c(p_.n + 1, 0.0);
    c[p_.n] = -1.0;
    c[p_.n - 2] = 1.0;
    c[0] = -2.0 * p_.m;
    auto deflate = [](std::vector<double>& a, double root) {
      std::vector<double> b(a.size() - 1, 0.0);
      double carry = a.back();
      for (size_t k = a.size() - 1; k-- > 0;) {
        b[k] = carry;
        carry = a[k] + root * carry;
      }
      a = std::move(b);  // remainder `carry` is the root residual, ~1e-16
    };
    deflate(c, r_lo_);
    deflate(c, r_hi_);
    q_.resize(c.size());
    for (size_t k = 0; k < c.size(); ++k) q_[k] = -c[k];  // (r_+ - r) = -(r - r_+)
  }

  void build_table() {
    const size_t cells = 8192;
    h_ = kPi / double(cells);
    s_.assign(cells + 1, 0.0);
    for (size_t i = 0; i < cells; ++i) {
      double a = h_ * double(i), b = a + h_;
      s_[i + 1] = s_[i] + h_ / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b));
    }
  }

  ModelParams p_;
  double r_lo_, r_hi_, rc_, R_, h_;
  std::vector<double> s_;
  std::vector<double> q_;  // deflated cofactor coefficients, ascending
};

inline WarpedProfile export_profile(const ModelTriple& t, size_t sample_count, Chart chart,
                                    const ToleranceConfig& tol = ToleranceConfig::defaults()) {
  if (sample_count < 16) throw std::invalid_argument("export_profile: sample_count >= 16");
  WarpedProfile pr;
  pr.n = t.params.n;
  pr.chart = chart;
  pr.fiber_einstein_constant = t.fiber_einstein_constant;
  pr.fiber_area_normalization = t.fiber_area_normalization;
  pr.params = t.params;
  pr.coord.resize(sample_count);
  pr.u.resize(sample_count);
  pr.warp.resize(sample_count);
  pr.du.resize(sample_count);

  if (t.cylindrical()) {
    if (chart == Chart::AreaRadius)
      throw std::domain_error(
          "export_profile: constant-warp (Nariai) profiles exist only in the proper-distance chart");
    double L = t.nariai_proper_length();
    double sqn = std::sqrt(double(t.params.n));
    for (size_t i = 0; i < sample_count; ++i) {
      double s = L * double(i) / double(sample_count - 1);
      pr.coord[i] = s;
      pr.u[i] = (i == 0 || i + 1 == sample_count) ? 0.0 : std::sin(sqn * s);
      pr.warp[i] = t.nariai_warp();
      pr.du[i] = sqn * std::abs(std::cos(sqn * s));
    }
    pr.cylindrical = true;
    pr.validate();
    return pr;
  }

  auto fill = [&](size_t i, double r, double c) {
    pr.coord[i] = c;
    pr.warp[i] = r;
    pr.u[i] = t.u_area_radius(r);
    pr.du[i] = t.du_area_radius(r);
  };

  if (chart == Chart::AreaRadius) {
    double r_lo = 0.0, r_hi = 1.0;
    if (t.params.m > 0.0) {
      auto [rm, rp] = horizon_radii(t.params, tol);
      r_lo = rm; r_hi = rp;
    }
    for (size_t i = 0; i < sample_count; ++i) {
      double r = r_lo + (r_hi - r_lo) * double(i) / double(sample_count - 1);
      fill(i, r, r);
    }
    if (t.params.m > 0.0) pr.u.front() = 0.0;
    pr.u.back() = 0.0;
  } else {
    ProperLengthMap map(t.params, tol);
    double L = map.total_length();
    for (size_t i = 0; i < sample_count; ++i) {
      double s = L * double(i) / double(sample_count - 1);
      double th = map.theta_of_s(s);
      double r = map.r_of_theta(th);
      fill(i, r, s);
      pr.u[i] = map.u_of_theta(th);
    }
    pr.coord.front() = 0.0;
    pr.coord.back() = L;
    pr.warp.front() = map.r_lo();
    pr.warp.back() = map.r_hi();
    if (t.params.m > 0.0) { pr.u.front() = 0.0; }
    pr.u.back() = 0.0;
  }
  pr.validate();
  return pr;
}

//---- CSV interchange -------------------------------------------------------

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Atomic write: temp file in the same directory, then rename.
inline void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("write failure: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failure: " + path);
}

inline void write_profile_csv(const WarpedProfile& pr, const std::string& path) {
  std::ostringstream out;
  out << "coord,u,warp\n";
  for (size_t i = 0; i < pr.size(); ++i)
    out << format_g17(pr.coord[i]) << ',' << format_g17(pr.u[i]) << ','
        << format_g17(pr.warp[i]) << '\n';
  atomic_write(path, out.str());
}

inline WarpedProfile read_profile_csv(const std::string& path, int n = 3,
                                      Chart chart = Chart::ProperDistance) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ProfileFormatError("empty profile file", 1);
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "coord,u,warp")
    throw ProfileFormatError("expected header 'coord,u,warp', got '" + line + "'", 1);
  WarpedProfile pr;
  pr.n = n;
  pr.chart = chart;
  pr.fiber_einstein_constant = double(n - 2);
  pr.fiber_area_normalization = unit_sphere_area(n - 1);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double c, u, w;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &c, &u, &w) != 3)
      throw ProfileFormatError("malformed CSV row", lineno);
    pr.coord.push_back(c);
    pr.u.push_back(u);
    pr.warp.push_back(w);
  }
  // Constant warp marks a cylindrical profile.
  if (pr.warp.size() > 1) {
    double w0 = pr.warp.front();
    pr.cylindrical = true;
    for (double w : pr.warp)
      if (std::abs(w - w0) > 1e-12 * (1.0 + std::abs(w0))) { pr.cylindrical = false; break; }
  }
  pr.validate();
  return pr;
}

}  // namespace kottler

#endif  // KOTTLER_PROFILE_HPP_
