// Inequality evaluation on horizon data: area bounds, scalar-curvature
// bounds, lower bounds, weighted balancing formulas, the comparison grid,
// and the uniqueness-hypothesis checker.
#ifndef KOTTLER_BOUNDS_HPP_
#define KOTTLER_BOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kottler/models.hpp"
#include "kottler/profile.hpp"
#include "kottler/solvers.hpp"

#include <json.hpp>

namespace kottler {

// Summary of a region bounded by horizons: (kappa, area) pairs plus the
// optional area of the separating hypersurface.
struct RegionInput {
  int n = 3;
  std::vector<std::pair<double, double>> horizons;  // (kappa, area)
  std::optional<double> sigma_area;

  void validate() const {
    if (n < 3) throw std::invalid_argument("RegionInput: dimension must be >= 3");
    if (horizons.empty()) throw std::invalid_argument("RegionInput: empty horizon list");
    for (auto& [k, a] : horizons) {
      if (!(k > 0.0)) throw std::invalid_argument("RegionInput: kappa must be positive");
      if (!(a >= 0.0)) throw std::invalid_argument("RegionInput: area must be nonnegative");
    }
    if (sigma_area && !(*sigma_area >= 0.0))
      throw std::invalid_argument("RegionInput: sigma_area must be nonnegative");
  }

  double kappa_max() const {
    double k = 0.0;
    for (auto& h : horizons) k = std::max(k, h.first);
    return k;
  }

  // Outer / Inner / Cylindrical by the position of max kappa relative to
  // sqrt(n), with a tie tolerance for the degenerate value.
  Region region_kind() const {
    double k = kappa_max(), sqn = std::sqrt(double(n));
    if (std::abs(k - sqn) <= kKappaTieTol * sqn) return Region::Cylindrical;
    return k < sqn ? Region::Outer : Region::Inner;
  }
};

struct BoundEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool sharp = false;
  std::string verdict;  // sharp | satisfied | violated | degenerate | ...
};

using BoundsReport = std::vector<BoundEntry>;

struct BoundsTolerances {
  double sharp_tol = 1e-6;  // relative
  double check_tol = 1e-9;  // relative slack before declaring violation
  double mass_tol = 1e-8;   // relative, for mass compatibility
};

namespace detail {

inline BoundEntry finish_entry(std::string name, double lhs, double rhs,
                               const BoundsTolerances& bt) {
  BoundEntry e;
  e.name = std::move(name);
  e.lhs = lhs;
  e.rhs = rhs;
  e.margin = rhs - lhs;
  double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  e.sharp = std::abs(e.margin) <= bt.sharp_tol * scale;
  e.verdict = e.sharp ? "sharp" : (e.margin < -bt.check_tol * scale ? "violated" : "satisfied");
  return e;
}

// Virtual mass of the region from its largest surface gravity.
inline double region_mass(const RegionInput& r) {
  switch (r.region_kind()) {
    case Region::Cylindrical: return m_max(r.n);
    case Region::Outer: return virtual_mass(r.n, r.kappa_max(), Region::Outer);
    case Region::Inner: return virtual_mass(r.n, r.kappa_max(), Region::Inner);
  }
  return 0.0;
}

}  // namespace detail

// |S| <= 4 pi r_+^2(m) (outer), 4 pi r_-^2(m) (inner), 4 pi / 3 (cylindrical)
// for the horizon with the largest surface gravity; m is recovered from that
// surface gravity.
inline BoundEntry area_bound_3d(const RegionInput& region,
                                const BoundsTolerances& bt = BoundsTolerances{}) {
  region.validate();
  if (region.n != 3) throw std::invalid_argument("area_bound_3d: n must be 3");
  Region kind = region.region_kind();
  double kmax = region.kappa_max();
  double lhs = 0.0;
  for (auto& [k, a] : region.horizons)
    if (k == kmax) lhs = std::max(lhs, a);
  double rhs;
  if (kind == Region::Cylindrical) {
    rhs = 4.0 * kPi / 3.0;
  } else if (kind == Region::Outer && kmax < 1.0) {
    // below the massless-model gravity: no admissible mass reproduces it,
    // so compare against the massless bound and flag the data
    rhs = 4.0 * kPi;
  } else {
    double m = detail::region_mass(region);
    auto [rm, rp] = horizon_radii(ModelParams(3, m));
    double r = kind == Region::Outer ? rp : rm;
    rhs = 4.0 * kPi * r * r;
  }
  BoundEntry e = detail::finish_entry("area_bound_3d", lhs, rhs, bt);
  if (kind == Region::Outer && kmax < 1.0 - kKappaTieTol)
    e.verdict = "positive_mass_violation";
  return e;
}

// |S| <= (int R^S / ((n-1)(n-2))) r_{+/-}^2(m); cylindrical uses n(n-1).
// When no fiber data is supplied the integral is derived from the
// Einstein-fiber normalization (round fiber of the matching model radius).
// A pointwise fiber scalar below (n-1)(n-2)/r^2 contradicts the pointwise
// version of the bound and is flagged.
inline BoundEntry scalar_curvature_bound(const RegionInput& region,
                                         std::optional<double> scalar_integral = std::nullopt,
                                         std::optional<double> pointwise_scalar = std::nullopt,
                                         const BoundsTolerances& bt = BoundsTolerances{}) {
  region.validate();
  int n = region.n;
  Region kind = region.region_kind();
  double kmax = region.kappa_max();
  double lhs = 0.0;
  for (auto& [k, a] : region.horizons)
    if (k == kmax) lhs = std::max(lhs, a);

  double rhs, floor_scalar;
  if (kind == Region::Cylindrical) {
    // |S| <= int R^S / (n(n-1)); model fiber has R^S = n(n-1) * (n-2)/n ... in
    // units where the fiber is the round sphere of radius sqrt((n-2)/n).
    double r2 = double(n - 2) / n;
    floor_scalar = (n - 1) * (n - 2) / r2;  // = n(n-1)
    double integral = scalar_integral ? *scalar_integral : lhs * floor_scalar;
    rhs = integral / (double(n) * (n - 1));
  } else {
    double m = detail::region_mass(region);
    auto [rm, rp] = horizon_radii(ModelParams(n, m));
    double r = kind == Region::Outer ? rp : rm;
    floor_scalar = (n - 1) * (n - 2) / (r * r);
    double integral = scalar_integral ? *scalar_integral : lhs * floor_scalar;
    rhs = integral / (double(n - 1) * (n - 2)) * r * r;
  }
  BoundEntry e = detail::finish_entry("scalar_curvature_bound", lhs, rhs, bt);
  if (pointwise_scalar && *pointwise_scalar < floor_scalar * (1.0 - bt.check_tol))
    e.verdict = "inconsistent_pointwise";
  return e;
}

// |boundary| >= (r_{+/-}(m)/r_0(m))^{n-1} |Sigma|; ratio 1 for cylindrical.
inline BoundEntry lower_bound(const RegionInput& region,
                              const BoundsTolerances& bt = BoundsTolerances{}) {
  region.validate();
  if (!region.sigma_area) throw std::invalid_argument("lower_bound: sigma_area required");
  int n = region.n;
  double boundary = 0.0;
  for (auto& h : region.horizons) boundary += h.second;
  Region kind = region.region_kind();
  double factor = 1.0;
  if (kind != Region::Cylindrical) {
    double m = detail::region_mass(region);
    auto [rm, rp] = horizon_radii(ModelParams(n, m));
    double r0 = photon_radius(ModelParams(n, m));
    factor = std::pow((kind == Region::Outer ? rp : rm) / r0, n - 1);
  }
  // stated as lower bound: lhs = required minimum, rhs = actual boundary area
  BoundEntry e = detail::finish_entry("lower_bound", factor * *region.sigma_area, boundary, bt);
  if (*region.sigma_area == 0.0) e.verdict = "degenerate";
  return e;
}

// |Sigma| <= 4 pi r_0^2(m).
inline BoundEntry sigma_bound_3d(double sigma_area, double m,
                                 const BoundsTolerances& bt = BoundsTolerances{}) {
  if (!(sigma_area >= 0.0)) throw std::invalid_argument("sigma_bound_3d: negative area");
  double r0 = photon_radius(ModelParams(3, m));
  return detail::finish_entry("sigma_bound_3d", sigma_area, 4.0 * kPi * r0 * r0, bt);
}

// Weighted balancing formula: with A_i = kappa_i / kappa_0,
//   sum_i [A_i^2 - c (1 - A_i^2)] kappa_i |S_i| / sum_i kappa_i <= rhs,
// where c = (3/2) r_+^2 (outer), (3/2) alpha r_-^2 (inner), 1/2 (cylindrical)
// and rhs = 4 pi r_{+/-}^2(m) or 4 pi / 3.
inline BoundEntry weighted_balance_3d(const RegionInput& region,
                                      const BoundsTolerances& bt = BoundsTolerances{}) {
  region.validate();
  if (region.n != 3) throw std::invalid_argument("weighted_balance_3d: n must be 3");
  Region kind = region.region_kind();
  double k0 = region.kappa_max();
  double c, rhs;
  if (kind == Region::Cylindrical) {
    c = 0.5;
    rhs = 4.0 * kPi / 3.0;
  } else {
    double m = detail::region_mass(region);
    auto [rm, rp] = horizon_radii(ModelParams(3, m));
    if (kind == Region::Outer) {
      c = 1.5 * rp * rp;
      rhs = 4.0 * kPi * rp * rp;
    } else {
      c = 1.5 * solve_alpha(ModelParams(3, m)) * rm * rm;
      rhs = 4.0 * kPi * rm * rm;
    }
  }
  double num = 0.0, den = 0.0;
  for (auto& [k, a] : region.horizons) {
    double A2 = (k / k0) * (k / k0);
    num += (A2 - c * (1.0 - A2)) * k * a;
    den += k;
  }
  return detail::finish_entry("weighted_balance_3d", num / den, rhs, bt);
}

// Ambrozio's bound: sum kappa_i |S_i| / sum kappa_i <= 4 pi / 3.  A single
// unit-surface-gravity horizon is the de Sitter solution, which the theorem
// excludes.
inline BoundEntry ambrozio_bound(const std::vector<std::pair<double, double>>& horizons,
                                 const BoundsTolerances& bt = BoundsTolerances{}) {
  if (horizons.empty()) throw std::invalid_argument("ambrozio_bound: empty horizon list");
  double num = 0.0, den = 0.0;
  for (auto& [k, a] : horizons) {
    if (!(k > 0.0)) throw std::invalid_argument("ambrozio_bound: kappa must be positive");
    num += k * a;
    den += k;
  }
  BoundEntry e = detail::finish_entry("ambrozio_bound", num / den, 4.0 * kPi / 3.0, bt);
  if (horizons.size() == 1 && std::abs(horizons[0].first - 1.0) <= kKappaTieTol)
    e.verdict = "out_of_hypothesis";
  return e;
}

//---- comparison grid --------------------------------------------------------

struct CompareCell {
  double m_plus = 0.0;
  double m_minus = 0.0;
  double rhs_ambrozio = 0.0;
  double rhs_ours = 0.0;
  double diff = 0.0;  // rhs_ambrozio - rhs_ours
  std::string cls;    // ours_much_stronger | ours_stronger | ambrozio_stronger
};

namespace detail {

inline double kappa_plus(double m) {
  ModelParams p(3, m);
  return p.at_m_max() ? std::sqrt(3.0) : surface_gravity_outer(p);
}
inline double kappa_minus(double m) {
  ModelParams p(3, m);
  return p.at_m_max() ? std::sqrt(3.0) : surface_gravity_inner(p);
}

}  // namespace detail

inline CompareCell compare_cell(double m_plus, double m_minus) {
  double kp = detail::kappa_plus(m_plus), km = detail::kappa_minus(m_minus);
  double rp = horizon_radii(ModelParams(3, m_plus)).second;
  double rm = horizon_radii(ModelParams(3, m_minus)).first;
  CompareCell c;
  c.m_plus = m_plus;
  c.m_minus = m_minus;
  c.rhs_ambrozio = 4.0 * kPi / 3.0 * (kp + km);
  c.rhs_ours = 4.0 * kPi * (kp * rp * rp + km * rm * rm);
  c.diff = c.rhs_ambrozio - c.rhs_ours;
  c.cls = c.diff > 3.0 ? "ours_much_stronger" : (c.diff > 0.0 ? "ours_stronger" : "ambrozio_stronger");
  return c;
}

// Fig.-3 style grid over (0, m_max)^2 with endpoints inset by m_max/1000.
inline std::vector<CompareCell> compare_grid(int resolution,
                                             std::optional<std::pair<double, double>> m_plus_range = std::nullopt,
                                             std::optional<std::pair<double, double>> m_minus_range = std::nullopt) {
  if (resolution < 2) throw std::invalid_argument("compare_grid: resolution must be >= 2");
  double mm = m_max(3), inset = mm / 1000.0;
  auto pr = m_plus_range.value_or(std::make_pair(inset, mm - inset));
  auto mr = m_minus_range.value_or(std::make_pair(inset, mm - inset));
  if (!(pr.first > 0.0 && pr.second <= mm && pr.first <= pr.second) ||
      !(mr.first > 0.0 && mr.second <= mm && mr.first <= mr.second))
    throw std::invalid_argument("compare_grid: mass ranges must lie within (0, m_max]");
  std::vector<CompareCell> out;
  out.reserve(size_t(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    double mp = pr.first + (pr.second - pr.first) * i / double(resolution - 1);
    for (int j = 0; j < resolution; ++j) {
      double mn = mr.first + (mr.second - mr.first) * j / double(resolution - 1);
      out.push_back(compare_cell(mp, mn));
    }
  }
  return out;
}

inline void write_compare_csv(const std::string& path, const std::vector<CompareCell>& grid) {
  std::string body = "m_plus,m_minus,rhs_ambrozio,rhs_ours,diff,class\n";
  for (auto& c : grid) {
    body += format_g17(c.m_plus) + ',' + format_g17(c.m_minus) + ',' +
            format_g17(c.rhs_ambrozio) + ',' + format_g17(c.rhs_ours) + ',' +
            format_g17(c.diff) + ',' + c.cls + '\n';
  }
  atomic_write(path, body);
}

//---- uniqueness hypotheses --------------------------------------------------

enum class UniquenessVerdict { SchwarzschildDeSitter, Nariai, Inconsistent, Inconclusive };

inline const char* to_string(UniquenessVerdict v) {
  switch (v) {
    case UniquenessVerdict::SchwarzschildDeSitter: return "schwarzschild_de_sitter";
    case UniquenessVerdict::Nariai: return "nariai";
    case UniquenessVerdict::Inconsistent: return "inconsistent";
    case UniquenessVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// Necessary conditions of the 3d uniqueness statement: mass compatibility of
// the two regions meeting at Sigma plus a connected cosmological horizon.
// Verdicts are necessary-condition reports, not isometry claims.
inline UniquenessVerdict uniqueness_check(const RegionInput& region_plus,
                                          const RegionInput& region_minus,
                                          const BoundsTolerances& bt = BoundsTolerances{}) {
  region_plus.validate();
  region_minus.validate();
  if (region_plus.n != 3 || region_minus.n != 3)
    throw std::invalid_argument("uniqueness_check: n must be 3");
  Region kp = region_plus.region_kind(), km = region_minus.region_kind();
  if (kp == Region::Inner)
    throw std::invalid_argument("uniqueness_check: region_plus must be outer or cylindrical");
  if (km == Region::Outer)
    throw std::invalid_argument("uniqueness_check: region_minus must be inner or cylindrical");
  double m_plus = detail::region_mass(region_plus);
  double m_minus = detail::region_mass(region_minus);
  double scale = std::max({m_plus, m_minus, 1e-300});
  if (m_minus > m_plus + bt.mass_tol * scale) return UniquenessVerdict::Inconsistent;
  bool mass_compatible = std::abs(m_plus - m_minus) <= bt.mass_tol * scale;
  bool connected = region_plus.horizons.size() == 1;
  if (mass_compatible && connected) {
    if (kp == Region::Cylindrical && km == Region::Cylindrical) return UniquenessVerdict::Nariai;
    if (kp == Region::Outer && km == Region::Inner)
      return UniquenessVerdict::SchwarzschildDeSitter;
  }
  return UniquenessVerdict::Inconclusive;
}

//---- serialization ----------------------------------------------------------

inline nlohmann::json bounds_report_json(const BoundsReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto& e : report)
    arr.push_back({{"name", e.name},
                   {"lhs", e.lhs},
                   {"rhs", e.rhs},
                   {"margin", e.margin},
                   {"sharp", e.sharp},
                   {"verdict", e.verdict}});
  return arr;
}

}  // namespace kottler

#endif  // KOTTLER_BOUNDS_HPP_
