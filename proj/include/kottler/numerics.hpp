// Root finding and singular-endpoint quadrature primitives.
#ifndef KOTTLER_NUMERICS_HPP_
#define KOTTLER_NUMERICS_HPP_

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace kottler {

struct ToleranceConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iter = 200;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter < 1)
      throw std::invalid_argument("ToleranceConfig: tolerances must be positive, max_iter >= 1");
  }

  // Default tolerance may be overridden through the KOTTLER_TOL environment
  // variable; explicit configuration always wins over the environment.
  static ToleranceConfig defaults() {
    ToleranceConfig tol;
    if (const char* env = std::getenv("KOTTLER_TOL")) {
      char* end = nullptr;
      double v = std::strtod(env, &end);
      if (end != env && v > 0.0) {
        tol.abs_tol = v;
        tol.rel_tol = 100.0 * v;
      }
    }
    return tol;
  }
};

struct SolverError : std::runtime_error {
  double bracket_lo, bracket_hi;
  SolverError(const std::string& what, double lo, double hi)
      : std::runtime_error(what + " [last bracket " + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]"),
        bracket_lo(lo), bracket_hi(hi) {}
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bracketed bisection with secant acceleration. The bracket [lo, hi] must
// straddle a sign change; convergence is then unconditional.
inline double find_root(const std::function<double(double)>& f, double lo, double hi,
                        const ToleranceConfig& tol = ToleranceConfig::defaults()) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw SolverError("find_root: bracket does not straddle a sign change", lo, hi);
  double x = 0.5 * (lo + hi), fx;
  for (int it = 0; it < tol.max_iter; ++it) {
    // Secant proposal from the bracket endpoints, safeguarded by bisection.
    double xs = lo - flo * (hi - lo) / (fhi - flo);
    double mid = 0.5 * (lo + hi);
    x = (xs > lo && xs < hi) ? xs : mid;
    // Keep the shrink rate at least bisection-like.
    if (std::abs(x - mid) > 0.25 * (hi - lo)) x = 0.5 * (x + mid);
    fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (flo > 0.0)) { lo = x; flo = fx; }
    else                           { hi = x; fhi = fx; }
    double scale = std::abs(lo) + std::abs(hi);
    if (hi - lo <= tol.abs_tol + tol.rel_tol * scale && std::abs(fx) <= tol.abs_tol)
      return 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (scale + 1.0))
      return 0.5 * (lo + hi);
  }
  if (std::abs(fx) <= 1e3 * tol.abs_tol) return x;
  throw SolverError("find_root: no convergence after max_iter", lo, hi);
}

// tanh-sinh (double-exponential) quadrature on (a, b). Handles algebraic
// endpoint singularities up to 1/sqrt blowup. Abscissas are generated as
// offsets from the endpoints so that f can resolve the singular scale.
inline double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  if (!(b > a)) {
    if (a == b) return 0.0;
    return -tanh_sinh(f, b, a, tol);
  }
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double pi2 = 1.5707963267948966;
  const int max_level = 12;
  const double t_max = 6.5;  // weights underflow beyond this

  auto eval = [&](double x) {
    double v = f(x);
    return std::isfinite(v) ? v : 0.0;  // integrable singularity hit exactly
  };

  auto node_pair = [&](double t) {
    double s = pi2 * std::sinh(t);
    double w = pi2 * std::cosh(t) / (std::cosh(s) * std::cosh(s));
    if (w < 1e-320) return 0.0;
    // distance from each endpoint: (b-a)/2 * (1 - tanh(s)) = (b-a)/(1+e^{2s})
    double d = (b - a) / (1.0 + std::exp(2.0 * s));
    return w * (eval(b - d) + eval(a + d));
  };

  double h = 1.0;
  double sum = pi2 * eval(mid);  // t = 0 node, weight pi/2 * cosh(0)/cosh^2(0)
  for (double t = 1.0; t <= t_max; t += 1.0) sum += node_pair(t);
  double integral = sum * h * half;
  double prev = integral;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    // New nodes at odd multiples of h.
    double add = 0.0;
    for (double t = h; t <= t_max; t += 2.0 * h) add += node_pair(t);
    sum = sum + add;  // trapezoid refinement: previous nodes keep their weights
    integral = sum * h * half;
    double err = std::abs(integral - prev);
    if (level >= 4 && err < tol * (1.0 + std::abs(integral))) return integral;
    prev = integral;
  }
  double err = std::abs(integral - prev);
  if (err < 1e4 * tol * (1.0 + std::abs(integral))) return integral;
  throw QuadratureError("tanh_sinh: no convergence (last estimates " + std::to_string(prev) +
                        ", " + std::to_string(integral) + ")");
}

namespace detail {
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0) return left + right;
  if (std::abs(left + right - whole) <= 15.0 * tol ||
      b - a <= 1e-14 * (std::abs(a) + std::abs(b)))
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 30);
}

// Independent scheme for the same class of integrals: substitute t = a + s^2
// (resp. t = b - s^2) on each half, which removes 1/sqrt endpoint blowups,
// then integrate the smooth result adaptively.
inline double sqrt_subst_integral(const std::function<double(double)>& f, double a, double b,
                                  double tol = 1e-12) {
  if (!(b > a)) {
    if (a == b) return 0.0;
    return -sqrt_subst_integral(f, b, a, tol);
  }
  double m = 0.5 * (a + b);
  // 2 s f(. + s^2) has a finite limit for integrable 1/sqrt blowups, but the
  // literal product at s = 0 is 0 * inf; treat it as its (zero-measure) limit
  auto guard = [](double v) { return std::isfinite(v) ? v : 0.0; };
  auto left = [&](double s) { return guard(2.0 * s * f(a + s * s)); };
  auto right = [&](double s) { return guard(2.0 * s * f(b - s * s)); };
  return adaptive_simpson(left, 0.0, std::sqrt(m - a), 0.5 * tol) +
         adaptive_simpson(right, 0.0, std::sqrt(b - m), 0.5 * tol);
}

// Primary singular quadrature entry point with the dual-scheme consistency
// contract: callers needing independent confirmation use sqrt_subst_integral.
inline double singular_integral(const std::function<double(double)>& f, double a, double b,
                                double tol = 1e-12) {
  return tanh_sinh(f, a, b, tol);
}

}  // namespace kottler

#endif  // KOTTLER_NUMERICS_HPP_
