// Command-line front end: mass inversion, model emission, profile
// verification, bound evaluation, comparison grids, pseudo-radial tables.
//
// Exit codes: 0 success / all checks pass, 1 bound-or-identity violation,
// 2 input or domain error, 3 I/O error.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kottler/bounds.hpp"
#include "kottler/geometry.hpp"
#include "kottler/models.hpp"
#include "kottler/profile.hpp"
#include "kottler/pseudo_radial.hpp"
#include "kottler/solvers.hpp"

namespace {

constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  try {
    kottler::atomic_write(out_path, text);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

std::vector<std::pair<double, double>> read_horizons_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open horizons file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw kottler::ProfileFormatError("empty horizons file", 1);
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "kappa,area")
    throw kottler::ProfileFormatError("expected header 'kappa,area', got '" + line + "'", 1);
  std::vector<std::pair<double, double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double k, a;
    if (std::sscanf(line.c_str(), "%lf,%lf", &k, &a) != 2)
      throw kottler::ProfileFormatError("malformed CSV row", lineno);
    rows.emplace_back(k, a);
  }
  return rows;
}

nlohmann::json report_json(const std::vector<kottler::IdentityReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto& r : reports)
    arr.push_back({{"name", r.name},
                   {"max_residual", r.max_residual},
                   {"location", r.location},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}});
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace kottler;
  CLI::App app{"Static vacuum metrics with positive cosmological constant: "
               "model data, inversions, verification, and area bounds"};
  app.require_subcommand(1);
  app.set_config("--config", "kottler.conf", "Plain key = value configuration file");
  app.allow_config_extras(true);

  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Increase verbosity");

  // mass: invert a surface gravity to the virtual mass
  auto* c_mass = app.add_subcommand("mass", "Invert a surface gravity to the virtual mass");
  int mass_n = 3;
  double mass_kappa = 0.0;
  std::string mass_region = "outer";
  c_mass->add_option("--n", mass_n, "Dimension")->check(CLI::Range(3, 16));
  c_mass->add_option("--kappa", mass_kappa, "Normalized surface gravity")->required();
  c_mass->add_option("--region", mass_region, "Region type")
      ->check(CLI::IsMember({"outer", "inner", "cylindrical"}));

  // model: emit a model profile CSV
  auto* c_model = app.add_subcommand("model", "Emit a model profile as CSV");
  std::string model_kind = "sds", model_chart = "proper", model_out;
  int model_n = 3;
  double model_m = -1.0;
  size_t model_samples = 512;
  c_model->add_option("--kind", model_kind, "Model family")
      ->check(CLI::IsMember({"sds", "nariai", "desitter"}));
  c_model->add_option("--n", model_n, "Dimension")->check(CLI::Range(3, 16));
  c_model->add_option("--m", model_m, "Mass parameter");
  c_model->add_option("--samples", model_samples, "Sample count");
  c_model->add_option("--chart", model_chart, "Radial chart")
      ->check(CLI::IsMember({"proper", "arearadius"}));
  c_model->add_option("--out", model_out, "Output CSV path");

  // verify: run the identity residual suite on a profile CSV
  auto* c_verify = app.add_subcommand("verify", "Verify the static identities on a profile");
  std::string verify_profile, verify_branch = "auto", verify_report;
  int verify_n = 3, verify_order = 4;
  double verify_m = -1.0, verify_tol = 1e-4;
  c_verify->add_option("--profile", verify_profile, "Profile CSV path")->required();
  c_verify->add_option("--n", verify_n, "Dimension")->check(CLI::Range(3, 16));
  c_verify->add_option("--m", verify_m, "Mass parameter (enables the conformal suite)");
  c_verify->add_option("--branch", verify_branch, "Pseudo-radial branch")
      ->check(CLI::IsMember({"auto", "outer", "inner", "cylindrical"}));
  c_verify->add_option("--tol", verify_tol, "Residual tolerance");
  c_verify->add_option("--order", verify_order, "Finite-difference order")
      ->check(CLI::IsMember({2, 4}));
  c_verify->add_option("--report", verify_report, "JSON report path");

  // bounds: evaluate the inequalities on horizon data
  auto* c_bounds = app.add_subcommand("bounds", "Evaluate the area bounds on horizon data");
  std::string bounds_horizons, bounds_report;
  int bounds_n = 3;
  double bounds_sigma = -1.0;
  c_bounds->add_option("--horizons", bounds_horizons, "CSV of kappa,area rows")->required();
  c_bounds->add_option("--n", bounds_n, "Dimension")->check(CLI::Range(3, 16));
  c_bounds->add_option("--sigma-area", bounds_sigma, "Area of the separating hypersurface");
  c_bounds->add_option("--report", bounds_report, "JSON report path");

  // compare: emit the inequality comparison grid
  auto* c_compare = app.add_subcommand("compare", "Emit the bound comparison grid");
  int compare_res = 200;
  std::string compare_out;
  c_compare->add_option("--resolution", compare_res, "Grid resolution per axis")
      ->check(CLI::Range(2, 4096));
  c_compare->add_option("--out", compare_out, "Output CSV path");

  // profile: tabulate the pseudo-radial functions or the surface gravities
  auto* c_profile = app.add_subcommand("profile", "Tabulate pseudo-radial data");
  int profile_n = 3;
  double profile_m = -1.0;
  size_t profile_samples = 100;
  std::string profile_out;
  bool profile_kappa_table = false;
  c_profile->add_option("--n", profile_n, "Dimension")->check(CLI::Range(3, 16));
  c_profile->add_option("--m", profile_m, "Mass parameter");
  c_profile->add_option("--samples", profile_samples, "Row count");
  c_profile->add_option("--out", profile_out, "Output CSV path");
  c_profile->add_flag("--kappa-table", profile_kappa_table,
                      "Emit a m,k_plus,k_minus table over (0, m_max) instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_mass) {
      Region region = mass_region == "outer"   ? Region::Outer
                      : mass_region == "inner" ? Region::Inner
                                               : Region::Cylindrical;
      double kappa = mass_region == "cylindrical" && mass_kappa == 0.0
                         ? std::sqrt(double(mass_n))
                         : mass_kappa;
      double m = virtual_mass(mass_n, kappa, region);
      std::printf("%.12g\n", m);
      return 0;
    }

    if (*c_model) {
      ModelKind kind;
      double m;
      if (model_kind == "sds") {
        if (model_m < 0.0) throw std::invalid_argument("model: --m required for kind sds");
        kind = ModelKind::SchwarzschildDeSitter;
        m = model_m;
      } else if (model_kind == "nariai") {
        kind = ModelKind::Nariai;
        m = m_max(model_n);
        if (model_m >= 0.0 && std::abs(model_m - m) > 1e-12)
          throw std::invalid_argument("model: kind nariai fixes m = m_max");
      } else {
        kind = ModelKind::DeSitter;
        m = 0.0;
        if (model_m > 0.0) throw std::invalid_argument("model: kind desitter fixes m = 0");
      }
      auto triple = build_model(kind, ModelParams(model_n, m));
      Chart chart = model_chart == "proper" ? Chart::ProperDistance : Chart::AreaRadius;
      auto prof = export_profile(triple, model_samples, chart);
      if (model_out.empty()) {
        std::ostringstream out;
        out << "coord,u,warp\n";
        for (size_t i = 0; i < prof.size(); ++i)
          out << format_g17(prof.coord[i]) << ',' << format_g17(prof.u[i]) << ','
              << format_g17(prof.warp[i]) << '\n';
        std::cout << out.str();
      } else {
        try {
          write_profile_csv(prof, model_out);
        } catch (const std::runtime_error& e) {
          throw IoError(e.what());
        }
      }
      return 0;
    }

    if (*c_verify) {
      WarpedProfile prof = read_profile_csv(verify_profile, verify_n);
      std::vector<IdentityReport> reports;
      if (verify_m >= 0.0) prof.params = ModelParams(verify_n, verify_m);
      auto stat = static_residuals(prof, verify_tol, verify_order);
      reports.insert(reports.end(), stat.begin(), stat.end());
      if (prof.params) {
        bool cyl = prof.cylindrical || prof.params->at_m_max();
        std::vector<Region> branches;
        if (verify_branch == "outer") branches = {Region::Outer};
        else if (verify_branch == "inner") branches = {Region::Inner};
        else if (verify_branch == "cylindrical") branches = {Region::Cylindrical};
        else if (cyl) branches = {Region::Cylindrical};
        else if (prof.params->m > 0.0) branches = {Region::Outer, Region::Inner};
        else branches = {Region::Outer};
        for (Region br : branches) {
          PseudoRadialBranch b(*prof.params, br);
          auto conf = conformal_identity_residuals(prof, b, verify_tol, verify_order);
          std::string tag = br == Region::Outer   ? "outer_"
                            : br == Region::Inner ? "inner_"
                                                  : "cylindrical_";
          for (auto& r : conf) {
            r.name = tag + r.name;
            reports.push_back(r);
          }
        }
      }
      bool all_pass = true;
      for (auto& r : reports) all_pass = all_pass && r.pass;
      std::string text = report_json(reports).dump(2) + "\n";
      emit(text, verify_report);
      if (verbosity > 0 && !verify_report.empty()) std::cout << text;
      return all_pass ? 0 : kExitViolation;
    }

    if (*c_bounds) {
      RegionInput region;
      region.n = bounds_n;
      region.horizons = read_horizons_csv(bounds_horizons);
      if (bounds_sigma >= 0.0) region.sigma_area = bounds_sigma;
      BoundsReport report;
      if (bounds_n == 3) {
        report.push_back(area_bound_3d(region));
        report.push_back(weighted_balance_3d(region));
        report.push_back(ambrozio_bound(region.horizons));
      }
      report.push_back(scalar_curvature_bound(region));
      if (region.sigma_area) {
        report.push_back(lower_bound(region));
        if (bounds_n == 3)
          report.push_back(sigma_bound_3d(*region.sigma_area, detail::region_mass(region)));
      }
      std::string text = bounds_report_json(report).dump(2) + "\n";
      emit(text, bounds_report);
      if (verbosity > 0 && !bounds_report.empty()) std::cout << text;
      for (auto& e : report)
        if (e.verdict == "violated" || e.verdict == "positive_mass_violation" ||
            e.verdict == "inconsistent_pointwise")
          return kExitViolation;
      return 0;
    }

    if (*c_compare) {
      auto grid = compare_grid(compare_res);
      if (compare_out.empty()) {
        std::string body = "m_plus,m_minus,rhs_ambrozio,rhs_ours,diff,class\n";
        for (auto& c : grid)
          body += format_g17(c.m_plus) + ',' + format_g17(c.m_minus) + ',' +
                  format_g17(c.rhs_ambrozio) + ',' + format_g17(c.rhs_ours) + ',' +
                  format_g17(c.diff) + ',' + c.cls + '\n';
        std::cout << body;
      } else {
        try {
          write_compare_csv(compare_out, grid);
        } catch (const std::runtime_error& e) {
          throw IoError(e.what());
        }
      }
      return 0;
    }

    if (*c_profile) {
      std::string body;
      if (profile_kappa_table) {
        // Fig.-2 style table of the surface gravities over the mass range.
        body = "m,k_plus,k_minus\n";
        double mm = m_max(profile_n), inset = mm / 1000.0;
        for (size_t i = 0; i < profile_samples; ++i) {
          double m = inset + (mm - 2.0 * inset) * double(i) / double(profile_samples - 1);
          ModelParams p(profile_n, m);
          body += format_g17(m) + ',' + format_g17(surface_gravity_outer(p)) + ',' +
                  format_g17(surface_gravity_inner(p)) + '\n';
        }
      } else {
        if (profile_m <= 0.0)
          throw std::invalid_argument("profile: --m in (0, m_max) required");
        ModelParams p(profile_n, profile_m);
        if (p.at_m_max())
          throw std::invalid_argument("profile: branches degenerate at m = m_max");
        PseudoRadialBranch outer(p, Region::Outer), inner(p, Region::Inner);
        double utop = outer.u_top();
        body = "u,psi_plus,psi_minus,phi_plus,phi_minus\n";
        for (size_t i = 0; i < profile_samples; ++i) {
          double u = utop * double(i) / double(profile_samples - 1);
          body += format_g17(u) + ',' + format_g17(outer.psi_of_u(u)) + ',' +
                  format_g17(inner.psi_of_u(u)) + ',' + format_g17(outer.phi_of_u(u)) + ',' +
                  format_g17(inner.phi_of_u(u)) + '\n';
        }
      }
      emit(body, profile_out);
      return 0;
    }
  } catch (const ProfileFormatError& e) {
    std::cerr << "input error: " << e.what() << " (line " << e.line << ")\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
