// End-to-end tests of the command-line binary; the path comes from the
// KOTTLER_CLI environment variable set by the test harness.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

std::string cli_path() {
  const char* p = std::getenv("KOTTLER_CLI");
  REQUIRE_MESSAGE(p != nullptr, "KOTTLER_CLI must point at the binary");
  return p;
}

struct RunResult {
  int code;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string out_file = "cli_test_stdout.tmp";
  std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>&1";
  int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  std::remove(out_file.c_str());
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) v.push_back(line);
  return v;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream(path) << content;
}

}  // namespace

TEST_CASE("mass inverts surface gravities and reports domain errors") {
  auto r = run("mass --n 3 --kappa 1.2601705163 --region outer");
  CHECK(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(0.1).epsilon(1e-5));
  auto i = run("mass --n 3 --kappa 3.4923729816 --region inner");
  CHECK(i.code == 0);
  CHECK(std::stod(i.out) == doctest::Approx(0.1).epsilon(1e-5));
  CHECK(run("mass --n 3 --kappa 0.5 --region outer").code == 2);
  CHECK(run("mass --n 3 --kappa 2.0 --region outer").code == 2);
}

TEST_CASE("model emits a schema-conformant profile that verifies clean") {
  auto r = run("model --kind sds --n 3 --m 0.1 --samples 512 --out cli_sds.csv");
  REQUIRE(r.code == 0);
  {
    std::ifstream in("cli_sds.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "coord,u,warp");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 512);
  }
  auto v = run("verify --profile cli_sds.csv --n 3 --m 0.1 --report cli_report.json");
  CHECK(v.code == 0);
  std::ifstream rep("cli_report.json");
  nlohmann::json j = nlohmann::json::parse(rep);
  REQUIRE(j.is_array());
  CHECK(j.size() >= 4);
  for (auto& e : j) {
    CAPTURE(e["name"].get<std::string>());
    CHECK(e["pass"].get<bool>());
    CHECK(e.contains("max_residual"));
    CHECK(e.contains("tolerance"));
  }
  std::remove("cli_report.json");
}

TEST_CASE("verification reports are deterministic across reruns") {
  REQUIRE(run("model --kind sds --m 0.1 --samples 256 --out cli_rt.csv").code == 0);
  REQUIRE(run("verify --profile cli_rt.csv --m 0.1 --report cli_rt_a.json").code == 0);
  REQUIRE(run("verify --profile cli_rt.csv --m 0.1 --report cli_rt_b.json").code == 0);
  std::stringstream a, b;
  a << std::ifstream("cli_rt_a.json").rdbuf();
  b << std::ifstream("cli_rt_b.json").rdbuf();
  CHECK(a.str() == b.str());
  CHECK(!a.str().empty());
  std::remove("cli_rt.csv");
  std::remove("cli_rt_a.json");
  std::remove("cli_rt_b.json");
}

TEST_CASE("verify flags perturbed data and malformed input") {
  // perturb the emitted model by one percent
  std::ifstream in("cli_sds.csv");
  std::string header, line;
  std::getline(in, header);
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  std::ostringstream bad;
  bad << header << "\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i > 4 && i + 4 < rows.size()) {
      double c, u, w;
      std::sscanf(rows[i].c_str(), "%lf,%lf,%lf", &c, &u, &w);
      char buf[128];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", c, u * (i % 2 ? 1.01 : 0.99), w);
      bad << buf << "\n";
    } else {
      bad << rows[i] << "\n";
    }
  }
  write_file("cli_bad.csv", bad.str());
  CHECK(run("verify --profile cli_bad.csv --n 3 --m 0.1").code == 1);
  write_file("cli_malformed.csv", "coord,u,warp\n0,0,0.2\nnot-a-row\n");
  auto m = run("verify --profile cli_malformed.csv");
  CHECK(m.code == 2);
  CHECK(m.out.find("line 3") != std::string::npos);
  std::remove("cli_bad.csv");
  std::remove("cli_malformed.csv");
  std::remove("cli_sds.csv");
}

TEST_CASE("bounds reports sharpness on model horizon data") {
  write_file("cli_nariai.csv",
             "kappa,area\n1.7320508075688772,4.1887902047863905\n"
             "1.7320508075688772,4.1887902047863905\n");
  auto r = run("bounds --horizons cli_nariai.csv --n 3");
  CHECK(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  bool saw_sharp_area = false;
  for (auto& e : j)
    if (e["name"] == "area_bound_3d") saw_sharp_area = e["verdict"] == "sharp";
  CHECK(saw_sharp_area);
  // inflate one horizon beyond the bound: nonzero exit
  write_file("cli_viol.csv", "kappa,area\n1.26,12.0\n");
  CHECK(run("bounds --horizons cli_viol.csv --n 3").code == 1);
  std::remove("cli_nariai.csv");
  std::remove("cli_viol.csv");
}

TEST_CASE("compare emits the grid with the documented cell values") {
  auto r = run("compare --resolution 20 --out cli_grid.csv");
  REQUIRE(r.code == 0);
  std::ifstream in("cli_grid.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "m_plus,m_minus,rhs_ambrozio,rhs_ours,diff,class");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 400);
  std::remove("cli_grid.csv");
}

TEST_CASE("profile tabulates branch data and the gravity table") {
  auto r = run("profile --n 3 --m 0.1 --samples 50");
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 51);
  CHECK(ls[0] == "u,psi_plus,psi_minus,phi_plus,phi_minus");
  // psi columns bracket the photon radius r_0 = 0.1^{1/3}
  double r0 = std::cbrt(0.1);
  for (size_t i = 1; i < ls.size(); ++i) {
    double u, pp, pm, fp, fm;
    REQUIRE(std::sscanf(ls[i].c_str(), "%lf,%lf,%lf,%lf,%lf", &u, &pp, &pm, &fp, &fm) == 5);
    CHECK(pp >= r0 - 1e-9);
    CHECK(pm <= r0 + 1e-9);
  }
  auto k = run("profile --n 3 --kappa-table --samples 40");
  REQUIRE(k.code == 0);
  auto kl = lines(k.out);
  REQUIRE(kl.size() == 41);
  CHECK(kl[0] == "m,k_plus,k_minus");
  CHECK(run("profile --n 3").code == 2);  // missing mass
}

TEST_CASE("configuration file supplies defaults") {
  write_file("kottler.conf", "[mass]\nn = 3\nkappa = 1.2601705163\nregion = outer\n");
  auto r = run("--config kottler.conf mass");
  CHECK(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(0.1).epsilon(1e-5));
  std::remove("kottler.conf");
}

TEST_CASE("tolerance environment variable is accepted") {
  auto r = run("mass --n 3 --kappa 1.2601705163 --region outer");
  std::string cmd = "KOTTLER_TOL=1e-6 " + cli_path() +
                    " mass --n 3 --kappa 1.2601705163 --region outer > cli_tol.tmp";
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::ifstream in("cli_tol.tmp");
  double loose;
  in >> loose;
  CHECK(loose == doctest::Approx(std::stod(r.out)).epsilon(1e-3));
  std::remove("cli_tol.tmp");
}
