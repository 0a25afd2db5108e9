#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kottler/numerics.hpp"

using namespace kottler;

TEST_CASE("find_root solves a bracketed transcendental equation") {
  double r = find_root([](double x) { return std::cos(x); }, 1.0, 2.0);
  CHECK(r == doctest::Approx(1.5707963267948966).epsilon(1e-9));
}

TEST_CASE("find_root accepts an exact root at a bracket endpoint") {
  auto f = [](double x) { return x * (x - 1.0); };
  CHECK(find_root(f, 0.0, 0.5) == 0.0);
  CHECK(find_root(f, 0.5, 1.0) == 1.0);
}

TEST_CASE("find_root rejects a bracket without a sign change") {
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), SolverError);
}

TEST_CASE("find_root handles a root with a flat approach") {
  // cubic tangency-adjacent root: secant alone would crawl
  double r = find_root([](double x) { return (x - 0.3) * (x - 0.3) * (x - 0.3); }, 0.0, 1.0);
  CHECK(r == doctest::Approx(0.3).epsilon(1e-5));
}

TEST_CASE("tanh_sinh integrates smooth functions") {
  double v = tanh_sinh([](double x) { return std::sin(x); }, 0.0, 3.141592653589793);
  CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("tanh_sinh resolves inverse-square-root endpoint singularities") {
  // int_0^1 dx/sqrt(x) = 2
  double v = tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(v == doctest::Approx(2.0).epsilon(1e-11));
  // int_{-1}^{1} dx/sqrt(1-x^2) = pi, singular at both ends; the integrand
  // itself loses digits to cancellation in 1 - x^2 near the endpoints, which
  // caps the attainable accuracy well above the quadrature error
  double w = tanh_sinh([](double x) { return 1.0 / std::sqrt(1.0 - x * x); }, -1.0, 1.0);
  CHECK(w == doctest::Approx(3.141592653589793).epsilon(1e-6));
}

TEST_CASE("tanh_sinh is antisymmetric under bound exchange") {
  auto f = [](double x) { return std::exp(-x); };
  CHECK(tanh_sinh(f, 0.0, 1.0) == doctest::Approx(-tanh_sinh(f, 1.0, 0.0)).epsilon(1e-14));
  CHECK(tanh_sinh(f, 2.0, 2.0) == 0.0);
}

TEST_CASE("sqrt substitution scheme agrees with tanh_sinh on singular integrands") {
  auto f = [](double x) { return 1.0 / std::sqrt(x * (1.0 - x)); };  // = pi
  double a = tanh_sinh(f, 0.0, 1.0);
  double b = sqrt_subst_integral(f, 0.0, 1.0);
  CHECK(a == doctest::Approx(3.141592653589793).epsilon(1e-6));
  CHECK(b == doctest::Approx(a).epsilon(1e-6));
}

TEST_CASE("adaptive_simpson integrates smooth functions to tolerance") {
  double v = adaptive_simpson([](double x) { return x * x * x - 2.0 * x; }, -1.0, 2.0);
  CHECK(v == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("tolerance configuration validates its fields") {
  ToleranceConfig tol;
  CHECK_NOTHROW(tol.validate());
  tol.abs_tol = -1.0;
  CHECK_THROWS_AS(tol.validate(), std::invalid_argument);
  ToleranceConfig bad;
  bad.max_iter = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("KOTTLER_TOL overrides the default tolerance") {
  setenv("KOTTLER_TOL", "1e-6", 1);
  ToleranceConfig tol = ToleranceConfig::defaults();
  CHECK(tol.abs_tol == 1e-6);
  CHECK(tol.rel_tol == doctest::Approx(1e-4).epsilon(1e-14));
  setenv("KOTTLER_TOL", "garbage", 1);
  CHECK(ToleranceConfig::defaults().abs_tol == 1e-12);
  unsetenv("KOTTLER_TOL");
  CHECK(ToleranceConfig::defaults().abs_tol == 1e-12);
}
