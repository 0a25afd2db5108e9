// Acceptance gate: one pass/fail line per criterion.  Criterion 5b is a
// documented expected failure (see the note printed with it); the process
// exits nonzero only on unexpected failures.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kottler/bounds.hpp"
#include "kottler/geometry.hpp"
#include "kottler/models.hpp"
#include "kottler/profile.hpp"
#include "kottler/pseudo_radial.hpp"
#include "kottler/solvers.hpp"

using namespace kottler;

namespace {

int unexpected_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail,
            bool expected_failure = false) {
  if (pass) {
    std::printf("[PASS] %-3s %s\n", id.c_str(), detail.c_str());
  } else if (expected_failure) {
    std::printf("[FAIL] %-3s %s (expected, see note)\n", id.c_str(), detail.c_str());
  } else {
    std::printf("[FAIL] %-3s %s\n", id.c_str(), detail.c_str());
    ++unexpected_failures;
  }
}

double worst(const std::vector<IdentityReport>& reps) {
  double w = 0.0;
  for (auto& r : reps) w = std::max(w, r.max_residual);
  return w;
}

WarpedProfile model_profile(ModelKind kind, double m, size_t N) {
  return export_profile(build_model(kind, ModelParams(3, m)), N, Chart::ProperDistance);
}

double sigma_position(const WarpedProfile& p) {
  size_t i = size_t(std::max_element(p.u.begin(), p.u.end()) - p.u.begin());
  double h = p.spacing();
  double um = p.u[i - 1], u0 = p.u[i], up = p.u[i + 1];
  return p.coord[i] + std::clamp(0.5 * h * (um - up) / (um - 2.0 * u0 + up), -h, h);
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("KOTTLER_CLI");
  if (!cli) return -1;
  int raw = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string read_header(const std::string& path) {
  std::ifstream in(path);
  std::string h;
  std::getline(in, h);
  return h;
}

}  // namespace

int main() {
  char buf[256];

  // 1: roots and inversions across the mass range
  {
    bool ok = true;
    double worst_poly = 0.0, worst_inv = 0.0, prev_kp = 0.0,
           prev_km = std::numeric_limits<double>::infinity();
    double mm = m_max(3);
    for (int i = 1; i <= 100; ++i) {
      double m = mm * i / 101.0;
      ModelParams p(3, m);
      auto [rm, rp] = horizon_radii(p);
      double r0 = photon_radius(p);
      ok = ok && rm < r0 && r0 < rp;
      worst_poly = std::max({worst_poly, std::abs(P_m(p, rm)), std::abs(P_m(p, rp))});
      double kp = surface_gravity_outer(p), km = surface_gravity_inner(p);
      ok = ok && kp > prev_kp && km < prev_km;
      prev_kp = kp;
      prev_km = km;
      worst_inv = std::max({worst_inv, std::abs(virtual_mass(3, kp, Region::Outer) - m),
                            std::abs(virtual_mass(3, km, Region::Inner) - m)});
    }
    ok = ok && worst_poly < 1e-12 && worst_inv < 1e-8;
    std::snprintf(buf, sizeof buf,
                  "roots/inversion on 100 masses: max poly residual %.2e, max "
                  "inversion error %.2e, ordering and monotonicity hold",
                  worst_poly, worst_inv);
    report("1", ok, buf);
  }

  // 2: degenerate endpoints of the surface gravities
  {
    double dev = std::abs(surface_gravity_outer(ModelParams(3, m_max(3) - 1e-9)) - std::sqrt(3.0));
    double km = surface_gravity_inner(ModelParams(3, 1e-7));
    std::snprintf(buf, sizeof buf,
                  "degenerate endpoints: |k_+ - sqrt(3)| = %.2e near the critical mass, "
                  "k_-(1e-7) = %.2e diverges",
                  dev, km);
    report("2", dev < 1e-4 && km > 1e3, buf);
  }

  // 3: sharpness of the area bounds on the three models
  {
    auto [rm, rp] = horizon_radii(ModelParams(3, 0.1));
    double cosmo = 4.0 * kPi * rp * rp, bh = 4.0 * kPi * rm * rm;
    bool ok = std::abs(cosmo - 9.70675424) < 1e-6 * 9.70675424 &&
              std::abs(bh - 0.54969378) < 1e-6 * 0.54969378;
    RegionInput ds;
    ds.horizons = {{1.0, 4.0 * kPi}};
    RegionInput nar;
    nar.horizons = {{std::sqrt(3.0), 4.0 * kPi / 3.0}, {std::sqrt(3.0), 4.0 * kPi / 3.0}};
    ok = ok && area_bound_3d(ds).sharp && area_bound_3d(nar).sharp;
    std::snprintf(buf, sizeof buf,
                  "sharpness: 4 pi r_+^2 = %.8f, 4 pi r_-^2 = %.8f; massless and "
                  "product models attain their bounds exactly",
                  cosmo, bh);
    report("3", ok, buf);
  }

  // 4: geometry of the separating hypersurface from sampled data
  {
    auto pr = model_profile(ModelKind::SchwarzschildDeSitter, 0.1, 4096);
    auto sg = sigma_from_profile(pr, 4);
    double h_ref = 2.0 * std::sqrt(std::pow(0.1, -2.0 / 3.0) - 3.0);
    double r_ref = 2.0 * std::pow(0.1, -2.0 / 3.0);
    bool ok = std::abs(sg.H - h_ref) < 1e-4 && std::abs(sg.R_sigma - r_ref) < 1e-4 &&
              std::abs(sg.ric_nn) < 1e-4;
    auto nar = model_profile(ModelKind::Nariai, m_max(3), 4096);
    auto ng = sigma_from_profile(nar, 4);
    ok = ok && std::abs(ng.H) < 1e-8 && std::abs(ng.R_sigma - 6.0) < 1e-8;
    std::snprintf(buf, sizeof buf,
                  "hypersurface data: H = %.6f (ref %.6f), R = %.6f (ref %.6f), "
                  "Ric(nu,nu) = %.1e; product model H = %.1e, R = %.8f",
                  sg.H, h_ref, sg.R_sigma, r_ref, sg.ric_nn, ng.H, ng.R_sigma);
    report("4", ok, buf);
  }

  // 5: gradient decay exponent at the degenerate maximum set
  {
    double sds = lojasiewicz_limit(model_profile(ModelKind::SchwarzschildDeSitter, 0.1, 4096), 4);
    double sds_ref = 6.0 * u_max(ModelParams(3, 0.1));
    std::snprintf(buf, sizeof buf, "decay exponent, two-horizon model: %.6f (ref %.6f)", sds,
                  sds_ref);
    report("5a", std::abs(sds - sds_ref) < 1e-3 * sds_ref, buf);

    double ds = lojasiewicz_limit(model_profile(ModelKind::DeSitter, 0.0, 4096), 4);
    std::snprintf(buf, sizeof buf, "decay exponent, massless model: %.6f (stated ref 6)", ds);
    report("5b", std::abs(ds - 6.0) < 1e-3 * 6.0, buf, /*expected_failure=*/true);
    std::printf(
        "       note: the stated reference 2 n u_max = 6 describes maxima along a\n"
        "       hypersurface; the massless model peaks at a single point, where the\n"
        "       potential is quadratic and the measured exponent is exactly 2\n"
        "       (measured %.6f). The formula's hypothesis does not apply there.\n",
        ds);

    double nar = lojasiewicz_limit(model_profile(ModelKind::Nariai, m_max(3), 4096), 4);
    std::snprintf(buf, sizeof buf, "decay exponent, product model: %.6f (ref 6)", nar);
    report("5c", std::abs(nar - 6.0) < 1e-3 * 6.0, buf);
  }

  // 6: identity residual suite with refinement
  {
    bool ok = true;
    double worst_fine = 0.0;
    double ratio_min = std::numeric_limits<double>::infinity();
    for (auto kind : {ModelKind::SchwarzschildDeSitter, ModelKind::Nariai, ModelKind::DeSitter}) {
      double m = kind == ModelKind::Nariai ? m_max(3) : (kind == ModelKind::DeSitter ? 0.0 : 0.1);
      std::vector<Region> branches;
      if (kind == ModelKind::Nariai) branches = {Region::Cylindrical};
      else if (kind == ModelKind::DeSitter) branches = {Region::Outer};
      else branches = {Region::Outer, Region::Inner};
      auto eval = [&](size_t N, int ord) {
        auto pr = model_profile(kind, m, N);
        double w = worst(static_residuals(pr, 1.0, ord));
        for (Region b : branches) {
          PseudoRadialBranch br(ModelParams(3, m), b);
          w = std::max(w, worst(conformal_identity_residuals(pr, br, 1.0, ord)));
        }
        return w;
      };
      worst_fine = std::max(worst_fine, eval(4096, 4));
      // convergence order measured in the truncation-dominated regime
      ratio_min = std::min(ratio_min, eval(512, 2) / eval(1024, 2));
    }
    ok = worst_fine < 1e-6 && ratio_min >= 3.0;
    std::snprintf(buf, sizeof buf,
                  "identity residuals: worst %.2e at 4096 samples; refinement "
                  "reduction >= %.2fx under mesh doubling",
                  worst_fine, ratio_min);
    report("6", ok, buf);
  }

  // 7: unit conformal gradient, vanishing gap, constant flux
  {
    ModelParams p(3, 0.1);
    auto pr = model_profile(ModelKind::SchwarzschildDeSitter, 0.1, 4096);
    size_t imax = size_t(std::max_element(pr.u.begin(), pr.u.end()) - pr.u.begin());
    double wdev = 0.0, gdev = 0.0, fdev = 0.0;
    for (Region b : {Region::Inner, Region::Outer}) {
      PseudoRadialBranch br(p, b);
      size_t lo = b == Region::Inner ? 4 : imax + 4;
      size_t hi = b == Region::Inner ? imax - 4 : pr.size() - 5;
      std::vector<double> sg(pr.coord.begin() + lo, pr.coord.begin() + hi);
      auto fl = phi_flux(pr, br, sg);
      for (double v : fl) fdev = std::max(fdev, std::abs(v - 4.0 * kPi) / (4.0 * kPi));
      for (size_t i = lo; i < hi; ++i) {
        auto st = br.gap_functions(pr.u[i], pr.du[i]);
        wdev = std::max(wdev, std::abs(st.w));
        gdev = std::max(gdev, std::abs(st.grad_phi_norm - 1.0));
      }
    }
    bool ok = gdev < 1e-10 && wdev < 1e-10 && fdev < 1e-8;
    std::snprintf(buf, sizeof buf,
                  "conformal gradient: max ||grad phi| - 1| = %.2e, max |w| = %.2e, "
                  "flux spread %.2e",
                  gdev, wdev, fdev);
    report("7", ok, buf);
  }

  // 8: expansion of the potential near the maximum
  {
    auto er = expansion_check(ModelParams(3, 0.1));
    double coef = 0.5 * er.curvature_coeff;
    double ref = -1.5 * u_max(ModelParams(3, 0.1));
    bool ok = er.slope >= 4.8 && std::abs(coef - ref) < 1e-3 * std::abs(ref);
    std::snprintf(buf, sizeof buf,
                  "expansion: deviation slope %.3f (>= 4.8), quadratic coefficient "
                  "%.8f (ref %.8f)",
                  er.slope, coef, ref);
    report("8", ok, buf);
  }

  // 9: weight exponent solver
  {
    double a1 = solve_alpha(ModelParams(3, m_max(3)));
    double a_small = solve_alpha(ModelParams(3, 1e-4));
    bool ok = std::abs(a1 - 1.0) < 1e-10 && a_small > 1e3;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 100 && ok; ++i) {
      double a = solve_alpha(ModelParams(3, m_max(3) * i / 101.0));
      ok = a >= 1.0 - 1e-12 && a <= prev + 1e-12;
      prev = a;
    }
    std::snprintf(buf, sizeof buf,
                  "weight exponent: alpha(m_max) - 1 = %.2e, alpha(1e-4) = %.2e, "
                  "nonincreasing and >= 1 on 100 masses",
                  a1 - 1.0, a_small);
    report("9", ok, buf);
  }

  // 10: comparison grid
  {
    auto c = compare_cell(0.1, 0.1);
    bool ok = std::abs(c.rhs_ours - 14.152) < 0.01 && std::abs(c.rhs_ambrozio - 19.905) < 0.01 &&
              std::abs(c.diff - 5.753) < 0.01 && c.cls == "ours_much_stronger";
    double diag_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 512; ++i) {
      double m = m_max(3) * (i + 0.5) / 512.0;
      diag_min = std::min(diag_min, compare_cell(m, m).diff);
    }
    ok = ok && diag_min >= 0.0;
    auto grid = compare_grid(50);
    int stronger = 0, much = 0;
    for (auto& g : grid) {
      if (g.cls == "ours_stronger") ++stronger;
      if (g.cls == "ours_much_stronger") ++much;
    }
    ok = ok && stronger > 0 && much > 0;
    std::snprintf(buf, sizeof buf,
                  "comparison grid: cell(0.1,0.1) = %.4f vs %.4f (diff %.4f, %s); "
                  "diagonal min diff %.2e; class counts %d / %d",
                  c.rhs_ours, c.rhs_ambrozio, c.diff, c.cls.c_str(), diag_min, stronger, much);
    report("10", ok, buf);
  }

  // 11: uniqueness verdicts
  {
    RegionInput plus, minus, nar, light, heavy;
    plus.horizons = {{surface_gravity_outer(ModelParams(3, 0.1)), 9.70675424}};
    minus.horizons = {{surface_gravity_inner(ModelParams(3, 0.1)), 0.54969378}};
    double k = std::sqrt(3.0), a = 4.0 * kPi / 3.0;
    nar.horizons = {{k, a}};  // one horizon bounds each side of the product model
    light.horizons = {{1.05, 9.0}};
    heavy.horizons = {{1.8, 0.5}};
    bool ok = uniqueness_check(plus, minus) == UniquenessVerdict::SchwarzschildDeSitter &&
              uniqueness_check(nar, nar) == UniquenessVerdict::Nariai &&
              uniqueness_check(light, heavy) == UniquenessVerdict::Inconsistent;
    std::snprintf(buf, sizeof buf,
                  "uniqueness verdicts: two-horizon -> %s, product -> %s, "
                  "mass-mismatched -> %s",
                  to_string(uniqueness_check(plus, minus)),
                  to_string(uniqueness_check(nar, nar)),
                  to_string(uniqueness_check(light, heavy)));
    report("11", ok, buf);
  }

  // 12: CLI figure recipes
  {
    if (!std::getenv("KOTTLER_CLI")) {
      report("12", false, "KOTTLER_CLI not set; cannot run the figure recipes");
    } else {
      bool ok = run_cli("profile --n 3 --kappa-table --samples 200 --out acc_fig2.csv") == 0 &&
                read_header("acc_fig2.csv") == "m,k_plus,k_minus";
      ok = ok && run_cli("compare --resolution 60 --out acc_fig3.csv") == 0 &&
           read_header("acc_fig3.csv") == "m_plus,m_minus,rhs_ambrozio,rhs_ours,diff,class";
      ok = ok && run_cli("profile --n 3 --m 0.1 --samples 100 --out acc_fig5.csv") == 0 &&
           read_header("acc_fig5.csv") == "u,psi_plus,psi_minus,phi_plus,phi_minus";
      std::remove("acc_fig2.csv");
      std::remove("acc_fig3.csv");
      std::remove("acc_fig5.csv");
      report("12", ok, "figure recipes: gravity table, comparison grid, branch table "
                       "all exit 0 with conformant headers");
    }
  }

  if (unexpected_failures > 0) {
    std::printf("%d unexpected failure(s)\n", unexpected_failures);
    return 1;
  }
  return 0;
}
