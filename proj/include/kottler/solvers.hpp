// Horizon radii, surface gravities, virtual mass inversion, and the alpha
// weight equation for the Schwarzschild-de Sitter family
//   f_m(r) = 1 - r^2 - 2 m r^{2-n},   P_m(r) = r^{n-2} - r^n - 2m.
#ifndef KOTTLER_SOLVERS_HPP_
#define KOTTLER_SOLVERS_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "kottler/numerics.hpp"

namespace kottler {

inline double m_max(int n) {
  if (n < 3) throw std::invalid_argument("dimension must be >= 3");
  return std::sqrt(std::pow(double(n - 2), n - 2) / std::pow(double(n), n));
}

// Snap width around m_max inside which parameters are routed to the
// degenerate (cylindrical) formulas.
inline constexpr double kMmaxSnap = 1e-10;
// Lower bracket endpoint for the inner root of P_m.
inline constexpr double kInnerBracketEps = 1e-14;

struct ModelParams {
  int n;
  double m;

  ModelParams(int n_, double m_) : n(n_), m(m_) {
    if (n < 3) throw std::invalid_argument("ModelParams: n must be >= 3");
    double mm = m_max(n);
    if (!(m >= 0.0) || m > mm * (1.0 + 1e-15))
      throw std::invalid_argument("ModelParams: m outside [0, m_max(n)], m_max = " +
                                  std::to_string(mm));
    if (m > mm) m = mm;
  }

  bool at_m_max() const { return std::abs(m - m_max(n)) <= kMmaxSnap; }
};

inline double f_m(const ModelParams& p, double r) {
  if (p.m == 0.0) return (1.0 - r) * (1.0 + r);
  return 1.0 - r * r - 2.0 * p.m * std::pow(r, 2 - p.n);
}
inline double df_m(const ModelParams& p, double r) {
  if (p.m == 0.0) return -2.0 * r;
  return -2.0 * r - 2.0 * p.m * (2 - p.n) * std::pow(r, 1 - p.n);
}
inline double P_m(const ModelParams& p, double r) {
  return std::pow(r, p.n - 2) - std::pow(r, p.n) - 2.0 * p.m;
}

// r_0 = ((n-2) m)^{1/n}, the radius where f_m attains its maximum.
inline double photon_radius(const ModelParams& p) {
  return std::pow((p.n - 2) * p.m, 1.0 / p.n);
}

inline double u_max(const ModelParams& p) {
  double x = 1.0 - std::pow(p.m / m_max(p.n), 2.0 / p.n);
  return x <= 0.0 ? 0.0 : std::sqrt(x);
}

inline std::pair<double, double> horizon_radii(const ModelParams& p,
                                               const ToleranceConfig& tol =
                                                   ToleranceConfig::defaults()) {
  if (p.m == 0.0) return {0.0, 1.0};
  double rc = std::sqrt(double(p.n - 2) / p.n);
  if (p.at_m_max()) return {rc, rc};
  double r0 = photon_radius(p);
  auto P = [&](double r) { return P_m(p, r); };
  // r_- ~ 2m as m -> 0, so the inner bracket floor must scale with m
  double r_minus = find_root(P, std::min(kInnerBracketEps, 0.5 * p.m), r0, tol);
  double r_plus = find_root(P, r0, 1.0, tol);
  // two Newton steps push the roots to machine precision; downstream
  // factorizations of P_m rely on that
  auto dP = [&](double r) { return (p.n - 2) * std::pow(r, p.n - 3) - p.n * std::pow(r, p.n - 1); };
  for (int k = 0; k < 2; ++k) {
    r_minus = std::clamp(r_minus - P(r_minus) / dP(r_minus), 0.0, r0);
    r_plus = std::clamp(r_plus - P(r_plus) / dP(r_plus), r0, 1.0);
  }
  return {r_minus, r_plus};
}

// Normalized surface gravities k_pm(m) = r_pm |1 - (r_0/r_pm)^n| / u_max.
inline double surface_gravity_outer(const ModelParams& p,
                                    const ToleranceConfig& tol = ToleranceConfig::defaults()) {
  if (p.at_m_max()) throw std::domain_error("surface_gravity_outer: undefined at m = m_max");
  if (p.m == 0.0) return 1.0;
  double rp = horizon_radii(p, tol).second;
  double r0 = photon_radius(p);
  return rp * std::abs(1.0 - std::pow(r0 / rp, p.n)) / u_max(p);
}

inline double surface_gravity_inner(const ModelParams& p,
                                    const ToleranceConfig& tol = ToleranceConfig::defaults()) {
  if (p.m == 0.0) throw std::domain_error("surface_gravity_inner: undefined at m = 0");
  if (p.at_m_max()) return std::sqrt(double(p.n));
  double rm = horizon_radii(p, tol).first;
  double r0 = photon_radius(p);
  return rm * std::abs(1.0 - std::pow(r0 / rm, p.n)) / u_max(p);
}

enum class Region { Outer, Inner, Cylindrical };

// Invert k_+ (increasing, [1, sqrt(n))) or k_- (decreasing, (sqrt(n), inf))
// by bracketed bisection on [0, m_max].
inline double virtual_mass(int n, double kappa, Region region,
                           const ToleranceConfig& tol = ToleranceConfig::defaults()) {
  double sqn = std::sqrt(double(n));
  if (kappa < 1.0)
    throw std::domain_error(
        "virtual_mass: kappa below de Sitter range (kappa >= 1 required; "
        "inconsistent with the positive mass statement)");
  if (std::abs(kappa - sqn) <= 1e-12) return m_max(n);
  double mm = m_max(n);
  if (region == Region::Outer) {
    if (!(kappa >= 1.0 && kappa < sqn))
      throw std::domain_error("virtual_mass: outer kappa must lie in [1, sqrt(n)) = [1, " +
                              std::to_string(sqn) + ")");
    if (kappa == 1.0) return 0.0;
    auto g = [&](double m) {
      return surface_gravity_outer(ModelParams(n, m), tol) - kappa;
    };
    return find_root(g, 0.0, mm - 4.0 * kMmaxSnap, tol);
  }
  if (region == Region::Inner) {
    if (!(kappa > sqn))
      throw std::domain_error("virtual_mass: inner kappa must lie in (sqrt(n), inf) = (" +
                              std::to_string(sqn) + ", inf)");
    // k_- decreasing in m; bracket below by a mass small enough that k_- > kappa.
    double lo = mm * 1e-18, hi = mm - 4.0 * kMmaxSnap;
    while (surface_gravity_inner(ModelParams(n, lo), tol) < kappa) lo *= 1e-2;
    auto g = [&](double m) {
      return surface_gravity_inner(ModelParams(n, m), tol) - kappa;
    };
    return find_root(g, lo, hi, tol);
  }
  throw std::domain_error("virtual_mass: cylindrical region requires kappa = sqrt(n)");
}

struct AlphaSolution {
  double alpha;        // the root >= 1 (larger quadratic root)
  double other_root;   // the discarded root
  bool ambiguous;      // both roots >= 1 (flagged, never silently accepted)
};

// q = r_-^n/m solves the weight equation q = 2(n-2)(n+a+1)/((na+2)(a+1)),
// i.e. the quadratic q n a^2 + [q(n+2) - 2(n-2)] a + [2q - 2(n-2)(n+1)] = 0.
inline AlphaSolution solve_alpha_info(const ModelParams& p,
                                      const ToleranceConfig& tol = ToleranceConfig::defaults()) {
  if (!(p.m > 0.0)) throw std::domain_error("solve_alpha: requires m > 0");
  double q;
  if (p.at_m_max()) {
    // r_-(m_max) = sqrt((n-2)/n), so q = ((n-2)/n)^{n/2} / m_max (= 1 for n=3).
    q = std::pow(double(p.n - 2) / p.n, 0.5 * p.n) / m_max(p.n);
  } else {
    double rm = horizon_radii(p, tol).first;
    q = std::pow(rm, p.n) / p.m;
  }
  double n = p.n;
  double A = q * n;
  double B = q * (n + 2) - 2.0 * (n - 2);
  double C = 2.0 * q - 2.0 * (n - 2) * (n + 1);
  double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) throw SolverError("solve_alpha: negative discriminant", 0, 0);
  double sq = std::sqrt(disc);
  // Numerically stable split of the two roots.
  double qq = -0.5 * (B + (B >= 0.0 ? sq : -sq));
  double r1 = qq / A, r2 = C / qq;
  double hi = std::max(r1, r2), lo = std::min(r1, r2);
  return {hi, lo, lo >= 1.0};
}

inline double solve_alpha(const ModelParams& p,
                          const ToleranceConfig& tol = ToleranceConfig::defaults()) {
  return solve_alpha_info(p, tol).alpha;
}

}  // namespace kottler

#endif  // KOTTLER_SOLVERS_HPP_
