// Closed-form model triples (de Sitter, Schwarzschild-de Sitter, Nariai and
// their generalized-fiber variants), horizon records, and the Sigma geometry.
#ifndef KOTTLER_MODELS_HPP_
#define KOTTLER_MODELS_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kottler/solvers.hpp"

namespace kottler {

inline constexpr double kPi = 3.14159265358979323846;

// Area of the unit round sphere S^k.
inline double unit_sphere_area(int k) {
  return 2.0 * std::pow(kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

enum class ModelKind { DeSitter, SchwarzschildDeSitter, Nariai, GeneralizedSdS, GeneralizedNariai };
enum class HorizonLabel { Cosmological, BlackHole, Cylindrical };

// Classification tie tolerance at kappa = sqrt(n).
inline constexpr double kKappaTieTol = 1e-10;

struct HorizonRecord {
  HorizonLabel label;
  double radius;  // warping value at the horizon
  double kappa;   // normalized surface gravity |Du|/u_max
  double area;    // uses fiber_area_normalization (ratio convention for n != 3)
};

inline HorizonLabel classify_horizon(int n, double kappa) {
  double sqn = std::sqrt(double(n));
  if (std::abs(kappa - sqn) <= kKappaTieTol) return HorizonLabel::Cylindrical;
  return kappa < sqn ? HorizonLabel::Cosmological : HorizonLabel::BlackHole;
}

struct ModelTriple {
  ModelKind kind;
  ModelParams params;
  double fiber_einstein_constant;   // n-2 for unit-normalized Einstein fibers
  double fiber_area_normalization;  // fiber area at unit warping

  bool cylindrical() const {
    return kind == ModelKind::Nariai || kind == ModelKind::GeneralizedNariai;
  }

  // Schwarzschild-de Sitter / de Sitter evaluators in the area-radius chart.
  double f(double r) const { return f_m(params, r); }
  double u_area_radius(double r) const {
    double v = f(r);
    return v <= 0.0 ? 0.0 : std::sqrt(v);
  }
  double du_area_radius(double r) const { return 0.5 * std::abs(df_m(params, r)); }

  // Nariai evaluators in the metric coordinate x in [0, pi] of
  // g0 = (1/n)[dx (x) dx + (n-2) g_fiber]; proper distance s = x / sqrt(n).
  double u_nariai(double x) const { return std::sin(x); }
  double du_nariai(double x) const { return std::sqrt(double(params.n)) * std::cos(x); }
  double nariai_warp() const { return std::sqrt(double(params.n - 2) / params.n); }
  double nariai_proper_length() const { return kPi / std::sqrt(double(params.n)); }
};

inline ModelTriple build_model(ModelKind kind, const ModelParams& params,
                               double fiber_einstein_constant = -1.0,
                               double fiber_area_normalization = -1.0) {
  switch (kind) {
    case ModelKind::DeSitter:
      if (params.m != 0.0) throw std::invalid_argument("build_model: de Sitter requires m = 0");
      break;
    case ModelKind::Nariai:
    case ModelKind::GeneralizedNariai:
      if (!params.at_m_max())
        throw std::invalid_argument("build_model: Nariai requires m = m_max");
      break;
    case ModelKind::SchwarzschildDeSitter:
    case ModelKind::GeneralizedSdS:
      if (!(params.m > 0.0) || params.at_m_max())
        throw std::invalid_argument("build_model: SdS requires 0 < m < m_max");
      break;
  }
  ModelTriple t{kind, params,
                fiber_einstein_constant > 0.0 ? fiber_einstein_constant : double(params.n - 2),
                fiber_area_normalization > 0.0 ? fiber_area_normalization
                                               : unit_sphere_area(params.n - 1)};
  return t;
}

inline std::vector<HorizonRecord> horizons(const ModelTriple& t,
                                           const ToleranceConfig& tol =
                                               ToleranceConfig::defaults()) {
  const int n = t.params.n;
  auto area = [&](double radius) {
    return t.fiber_area_normalization * std::pow(radius, n - 1);
  };
  std::vector<HorizonRecord> out;
  if (t.cylindrical()) {
    double r = t.nariai_warp(), k = std::sqrt(double(n));
    out.push_back({HorizonLabel::Cylindrical, r, k, area(r)});
    out.push_back({HorizonLabel::Cylindrical, r, k, area(r)});
    return out;
  }
  if (t.params.m == 0.0) {
    out.push_back({HorizonLabel::Cosmological, 1.0, 1.0, area(1.0)});
    return out;
  }
  auto [rm, rp] = horizon_radii(t.params, tol);
  double kp = surface_gravity_outer(t.params, tol);
  double km = surface_gravity_inner(t.params, tol);
  out.push_back({classify_horizon(n, kp), rp, kp, area(rp)});
  out.push_back({classify_horizon(n, km), rm, km, area(rm)});
  return out;
}

struct SigmaGeometry {
  double H;                // mean curvature w.r.t. the normal toward the outer region
  double h_traceless_norm; // |ring h|
  double R_sigma;          // scalar curvature of Sigma
  double ric_nn;           // Ric(nu, nu)
  double area;
};

// Closed forms for the maximum hypersurface Sigma of the n = 3 models.
inline SigmaGeometry sigma_geometry(const ModelParams& p) {
  if (p.n != 3) throw std::domain_error("sigma_geometry: implemented for n = 3");
  if (!(p.m > 0.0)) throw std::domain_error("sigma_geometry: de Sitter has no Sigma");
  if (p.at_m_max()) return {0.0, 0.0, 6.0, 0.0, 4.0 * kPi / 3.0};
  double mp = std::pow(p.m, -2.0 / 3.0);
  double r0 = photon_radius(p);
  return {2.0 * std::sqrt(mp - 3.0), 0.0, 2.0 * mp, 0.0, 4.0 * kPi * r0 * r0};
}

}  // namespace kottler

#endif  // KOTTLER_MODELS_HPP_
