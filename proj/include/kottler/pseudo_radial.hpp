// Pseudo-radial branches psi(u), the pseudo-affine function phi, the conformal
// gradient |grad phi|_g, and the auxiliary weights w, beta, gamma.
#ifndef KOTTLER_PSEUDO_RADIAL_HPP_
#define KOTTLER_PSEUDO_RADIAL_HPP_

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "kottler/profile.hpp"
#include "kottler/solvers.hpp"

namespace kottler {

struct ConformalState {
  double phi;            // pseudo-affine value
  double grad_phi_norm;  // |grad phi|_g
  double w;              // gap function beta * (1 - |grad phi|_g^2)
  double beta;
  double gamma;
};

// A single branch of the pseudo-radial function: Outer covers psi in
// [r_0, r_+], Inner covers [r_-, r_0], Cylindrical is the constant-warp
// degenerate case at m = m_max.  Immutable after construction; the phi
// interpolation cache is built in the constructor and read-only afterwards
// (cache accuracy ~1e-9, in practice near machine precision).
class PseudoRadialBranch {
 public:
  PseudoRadialBranch(const ModelParams& p, Region branch,
                     const ToleranceConfig& tol = ToleranceConfig::defaults())
      : params_(p), branch_(branch), tol_(tol) {
    if (branch == Region::Cylindrical) {
      if (!p.at_m_max())
        throw std::domain_error("PseudoRadialBranch: cylindrical branch requires m = m_max");
      r0_ = photon_radius(p);
      rm_ = rp_ = r0_;
      umax_ = 1.0;
      return;
    }
    if (p.at_m_max())
      throw std::domain_error("PseudoRadialBranch: branches degenerate at m = m_max");
    umax_ = u_max(p);
    r0_ = photon_radius(p);
    if (p.m == 0.0) {
      if (branch == Region::Inner)
        throw std::domain_error("PseudoRadialBranch: inner branch empty for m = 0");
      rm_ = 0.0;
      rp_ = 1.0;
      return;  // de Sitter: closed forms, no cache
    }
    auto [rm, rp] = horizon_radii(p, tol);
    rm_ = rm;
    rp_ = rp;
    if (branch == Region::Inner) alpha_ = solve_alpha(p, tol);
    map_ = std::make_shared<ProperLengthMap>(p, tol);
    build_phi_cache();
  }

  const ModelParams& params() const { return params_; }
  Region branch() const { return branch_; }
  double r_minus() const { return rm_; }
  double r_plus() const { return rp_; }
  double r_zero() const { return r0_; }
  double u_top() const { return umax_; }
  double alpha() const { return alpha_; }

  double branch_lo() const { return branch_ == Region::Inner ? rm_ : r0_; }
  double branch_hi() const { return branch_ == Region::Inner ? r0_ : rp_; }

  double psi_of_u(double u) const {
    check_u(u, /*allow_top=*/true);
    if (branch_ == Region::Cylindrical) return r0_;
    if (params_.m == 0.0) return std::sqrt(std::max(0.0, (1.0 - u) * (1.0 + u)));
    if (u == 0.0) return branch_ == Region::Inner ? rm_ : rp_;
    // Near the top the defining relation degenerates quadratically:
    // u_max^2 - u^2 = n (psi - r_0)^2 + O((psi - r_0)^3), since f''(r_0) = -2n.
    double gap = (umax_ - u) * (umax_ + u);
    if (umax_ - u <= 1e-7 * umax_) {
      // signed offset x = psi - r_0 from gap = n x^2 + c3 x^3 + O(x^4),
      // c3 = -f'''(r_0)/6 = -n(n-1)/(3 r_0); one Newton step off the
      // quadratic seed keeps the relative error at O(x^2).
      double n = params_.n;
      double c3 = -n * (n - 1) / (3.0 * r0_);
      double x = std::sqrt(std::max(0.0, gap) / n);
      if (branch_ == Region::Inner) x = -x;
      if (x != 0.0)
        x -= (n * x * x + c3 * x * x * x - gap) / (2.0 * n * x + 3.0 * c3 * x * x);
      return r0_ + x;
    }
    double lo = branch_lo(), hi = branch_hi();
    auto g = [&](double psi) { return f_m(params_, psi) - u * u; };
    double gl = g(lo), gh = g(hi);
    // u^2 below the horizon-root residual of f: the root collapses onto the
    // horizon endpoint to within ~1e-12.
    if ((gl > 0.0) == (gh > 0.0)) return branch_ == Region::Inner ? lo : hi;
    double psi = find_root(g, lo, hi, tol_);
    // polish: the bracketed solve can stall at ~1e-7 where f' is small
    for (int it = 0; it < 2; ++it) {
      double fp = df_m(params_, psi);
      if (fp == 0.0) break;
      psi = std::clamp(psi - g(psi) / fp, lo, hi);
    }
    return psi;
  }

  // (psi_dot, psi_ddot) as functions of u; pole at u = u_max.
  std::pair<double, double> psi_derivatives(double u) const {
    check_u(u, /*allow_top=*/false);
    if (branch_ == Region::Cylindrical) return {0.0, 0.0};
    double psi = psi_of_u(u);
    double denom = psi * (1.0 - std::pow(r0_ / psi, params_.n));
    if (u == 0.0) return {0.0, -1.0 / denom};
    double pd = -u / denom;
    double pdd = params_.n * pd * pd * pd / u + (params_.n - 1) * pd * pd / psi + pd / u;
    return {pd, pdd};
  }

  // Pseudo-affine function of the pseudo-radius: the arclength integral of
  // 1/(t sqrt(f)) from psi to r_+.  phi(r_+) = 0; strictly decreasing in psi.
  double phi(double psi_value) const {
    if (branch_ == Region::Cylindrical)
      throw std::domain_error("phi: cylindrical branch is parametrized by u, use phi_of_u");
    double lo = branch_lo(), hi = branch_hi();
    double slack = 1e-12 * (1.0 + hi);
    if (psi_value < lo - slack || psi_value > hi + slack)
      throw std::domain_error("phi: psi outside the branch range");
    psi_value = std::clamp(psi_value, lo, hi);
    if (params_.m == 0.0) {
      // de Sitter closed form: inverse hyperbolic secant.
      if (psi_value == 0.0) return std::numeric_limits<double>::infinity();
      return std::log((1.0 + std::sqrt((1.0 - psi_value) * (1.0 + psi_value))) / psi_value);
    }
    double range = hi - lo;
    double xi = branch_ == Region::Inner ? std::sqrt(std::max(0.0, (psi_value - rm_) / range))
                                         : std::sqrt(std::max(0.0, (rp_ - psi_value) / range));
    return cache_eval(std::clamp(xi, 0.0, 1.0));
  }

  double phi_of_u(double u) const {
    check_u(u, /*allow_top=*/true);
    if (branch_ == Region::Cylindrical)
      return std::asin(std::clamp(u, -1.0, 1.0)) / std::sqrt(double(params_.n - 2));
    return phi(psi_of_u(u));
  }

  double phi_zero() const {  // phi at the top of the branch (psi = r_0)
    if (branch_ == Region::Cylindrical) return 0.5 * kPi / std::sqrt(double(params_.n - 2));
    return phi(r0_);
  }

  double phi_max() const {  // phi at the inner horizon
    if (branch_ != Region::Inner) throw std::domain_error("phi_max: inner branch only");
    return phi(rm_);
  }

  // |grad phi|_g = |Du| / (psi |1 - (r_0/psi)^n|); the degenerate-top value is
  // the limit, which equals 1 for solution inputs.
  double grad_phi_norm(double u, double du_norm) const {
    check_u(u, /*allow_top=*/true);
    if (branch_ == Region::Cylindrical) {
      double d = double(params_.n) * (1.0 - u) * (1.0 + u);
      if (d <= 0.0) return 1.0;
      return du_norm / std::sqrt(d);
    }
    if (umax_ - u <= 1e-14 * umax_) return 1.0;
    double psi = psi_of_u(u);
    double denom = std::abs(psi * (1.0 - std::pow(r0_ / psi, params_.n)));
    return du_norm / denom;
  }

  ConformalState gap_functions(double u, double du_norm) const {
    ConformalState st{};
    st.phi = phi_of_u(u);
    st.grad_phi_norm = grad_phi_norm(u, du_norm);
    int n = params_.n;
    if (branch_ == Region::Cylindrical) {
      st.beta = 1.0;  // constant-warp normalization: w = 1 - |grad phi|^2
      st.w = st.beta * (1.0 - st.grad_phi_norm * st.grad_phi_norm);
      double c2 = std::max(0.0, (1.0 - u) * (1.0 + u));
      st.gamma = u > 0.0 ? std::pow(c2, 1.5) / u : std::numeric_limits<double>::infinity();
      return st;
    }
    double psi = psi_of_u(u);
    double h = 1.0 - (n - 2) * params_.m * std::pow(psi, -n);  // 1 - (r_0/psi)^n
    st.beta = psi * psi * std::abs(h);
    st.w = st.beta * (1.0 - st.grad_phi_norm * st.grad_phi_norm);
    if (u == 0.0) {
      st.gamma = std::numeric_limits<double>::infinity();
      return st;
    }
    if (branch_ == Region::Outer) {
      st.gamma = std::pow(psi, 2 * (n + 1)) * h * h * h / u;
    } else {
      st.gamma = std::pow(psi, n * alpha_ + n + 2) * std::pow(std::abs(h), alpha_ + 2.0) / u;
    }
    return st;
  }

  // Closed-form limit of psi_dot * gamma as u -> 0 on the outer branch.
  double limit_aux() const {
    if (branch_ != Region::Outer) throw std::domain_error("limit_aux: outer branch only");
    double h = 1.0 - (params_.n - 2) * params_.m * std::pow(rp_, -params_.n);
    return -std::pow(rp_, 2 * params_.n + 1) * h * h;
  }

 private:
  void check_u(double u, bool allow_top) const {
    double top = branch_ == Region::Cylindrical ? 1.0 : umax_;
    double slack = 1e-12 * (1.0 + top);
    if (u < -slack || u > top + slack || (!allow_top && u >= top))
      throw std::domain_error("pseudo-radial branch: u outside [0, u_max]");
  }

  // phi sampled on a Chebyshev-Lobatto grid in xi, where
  //   psi = r_+ - (r_+ - r_0) xi^2   (Outer)
  //   psi = r_- + (r_0 - r_-) xi^2   (Inner);
  // the square-root reparametrization makes phi(xi) analytic across the
  // horizon endpoint, so barycentric interpolation converges geometrically.
  void build_phi_cache() {
    const int N = 96;
    xi_.resize(N + 1);
    val_.resize(N + 1);
    wt_.resize(N + 1);
    double phi0 = phi_direct(r0_);
    for (int j = 0; j <= N; ++j) {
      xi_[j] = 0.5 * (1.0 - std::cos(kPi * j / N));
      double range = branch_hi() - branch_lo();
      double psi = branch_ == Region::Inner ? rm_ + range * xi_[j] * xi_[j]
                                            : rp_ - range * xi_[j] * xi_[j];
      val_[j] = (branch_ == Region::Inner && j == N) ? phi0
              : (branch_ == Region::Outer && j == 0) ? 0.0
                                                     : phi_direct(psi);
      wt_[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);
    }
  }

  // Direct quadrature through the smooth proper-length chart: the
  // theta-substitution turns d(psi)/(psi sqrt(f)) into g(theta)/r(theta),
  // bounded on [0, pi].
  double phi_direct(double psi) const {
    double th = map_->theta_of_r(psi);
    return adaptive_simpson([&](double t) { return map_->g(t) / map_->r_of_theta(t); }, th, kPi,
                            1e-13);
  }

  double cache_eval(double xi) const {
    double num = 0.0, den = 0.0;
    for (size_t j = 0; j < xi_.size(); ++j) {
      double d = xi - xi_[j];
      if (d == 0.0) return val_[j];
      double q = wt_[j] / d;
      num += q * val_[j];
      den += q;
    }
    return num / den;
  }

  ModelParams params_;
  Region branch_;
  ToleranceConfig tol_;
  double rm_ = 0.0, rp_ = 0.0, r0_ = 0.0, umax_ = 0.0, alpha_ = 0.0;
  std::shared_ptr<ProperLengthMap> map_;
  std::vector<double> xi_, val_, wt_;
};

}  // namespace kottler

#endif  // KOTTLER_PSEUDO_RADIAL_HPP_
