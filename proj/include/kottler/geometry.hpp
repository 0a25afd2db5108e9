// Differential-identity verification on warped-product profiles: static
// vacuum residuals, conformal/Bochner identities, the near-maximum expansion
// of u, the gradient-ratio limit at the maximum set, and the flux Phi.
#ifndef KOTTLER_GEOMETRY_HPP_
#define KOTTLER_GEOMETRY_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kottler/pseudo_radial.hpp"
#include "kottler/profile.hpp"

namespace kottler {

struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IdentityReport {
  std::string name;
  double max_residual = 0.0;
  double location = 0.0;  // coordinate of the max residual
  double tolerance = 0.0;
  bool pass = false;
};

namespace detail {

// Finite-difference derivatives with respect to proper distance s on a
// uniform coordinate grid.  In the AreaRadius chart the metric is read as
// dr^2/u^2 + r^2 g_E, so d/ds = u d/dr.
class DerivOps {
 public:
  DerivOps(const WarpedProfile& p, int stencil_order) : p_(p), order_(stencil_order) {
    size_t N = p.size();
    if (N < 5) throw ResolutionError("derivative stencils require at least 5 samples");
    h_ = p.spacing();
    // Stencils assume uniform spacing.
    for (size_t i = 0; i + 1 < N; ++i)
      if (std::abs(p.coord[i + 1] - p.coord[i] - h_) > 1e-9 * (std::abs(h_) + 1.0))
        throw ResolutionError("derivative stencils require a uniform grid");
    if (order_ != 2 && order_ != 4) throw std::invalid_argument("stencil_order must be 2 or 4");
  }

  size_t halo() const { return 2; }
  double spacing() const { return h_; }

  // First derivative of the samples v with respect to the grid coordinate:
  // 4th-order centered 5-point stencil.
  double d1c(const std::vector<double>& v, size_t i) const {
    return (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h_);
  }
  // Second derivative: centered, 2nd order by default (truncation-dominated,
  // so residuals shrink under refinement), 4th order on request.
  double d2c(const std::vector<double>& v, size_t i) const {
    if (order_ == 4)
      return (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) /
             (12.0 * h_ * h_);
    return (v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h_ * h_);
  }

  double d1s(const std::vector<double>& v, size_t i) const {
    double d = d1c(v, i);
    return p_.chart == Chart::AreaRadius ? p_.u[i] * d : d;
  }
  double d2s(const std::vector<double>& v, size_t i) const {
    if (p_.chart == Chart::ProperDistance) return d2c(v, i);
    double ur = d1c(p_.u, i);
    return p_.u[i] * (ur * d1c(v, i) + p_.u[i] * d2c(v, i));
  }

 private:
  const WarpedProfile& p_;
  double h_;
  int order_;
};

inline size_t margin_count(const WarpedProfile& p) {
  return std::max<size_t>(3, size_t(0.025 * double(p.size())) + 1);
}

// b and its s-derivatives at sample i (AreaRadius chart: b = r, b' = u).
struct WarpDerivs {
  double b, bs, bss;
};
inline WarpDerivs warp_derivs(const WarpedProfile& p, const DerivOps& d, size_t i) {
  return {p.warp[i], d.d1s(p.warp, i), d.d2s(p.warp, i)};
}

inline void bump_report(IdentityReport& rep, double res, double loc) {
  if (std::abs(res) > rep.max_residual) {
    rep.max_residual = std::abs(res);
    rep.location = loc;
  }
}

}  // namespace detail

// Residuals of the warped-product reduction of the static vacuum system
// (radial equation, tangential equation, Laplacian equation) plus the
// constancy of the scalar curvature, evaluated over the interior of the grid.
inline std::vector<IdentityReport> static_residuals(const WarpedProfile& p, double tol = 1e-6,
                                                    int stencil_order = 2) {
  p.validate();
  detail::DerivOps d(p, stencil_order);
  size_t N = p.size(), mgn = detail::margin_count(p);
  if (N < 2 * mgn + 5) throw ResolutionError("too few samples for interior residual window");
  int n = p.n;
  double c = p.fiber_einstein_constant;
  std::vector<IdentityReport> reps(4);
  reps[0].name = "static_radial";
  reps[1].name = "static_tangential";
  reps[2].name = "static_laplacian";
  reps[3].name = "scalar_curvature_constancy";
  for (auto& r : reps) r.tolerance = tol;
  for (size_t i = mgn; i + mgn < N; ++i) {
    auto [b, bs, bss] = detail::warp_derivs(p, d, i);
    double u = p.u[i];
    double us = d.d1s(p.u, i), uss = d.d2s(p.u, i);
    double loc = p.coord[i];
    detail::bump_report(reps[0], -(n - 1) * (bss / b) * u - uss - n * u, loc);
    detail::bump_report(reps[1], u * (c - b * bss - (n - 2) * bs * bs) - us * b * bs - n * u * b * b,
                        loc);
    detail::bump_report(reps[2], uss + (n - 1) * (bs / b) * us + n * u, loc);
    double R = (n - 1) * (c - (n - 2) * bs * bs) / (b * b) - 2.0 * (n - 1) * bss / b;
    detail::bump_report(reps[3], R - n * (n - 1), loc);
  }
  for (auto& r : reps) r.pass = r.max_residual < r.tolerance;
  return reps;
}

struct ExpansionReport {
  std::string name = "near_maximum_expansion";
  double max_residual = 0.0;  // max |u_exact - series| / d^5 over the window
  double slope = 0.0;         // log–log regression slope of the deviation
  double curvature_coeff = 0.0;  // second difference of u at the maximum, / d^2
  double tolerance = 4.8;        // slope acceptance threshold
  bool pass = false;
};

// Deviation between the exact model potential and its 4th-order expansion in
// the signed proper distance d from the maximum hypersurface (d > 0 toward
// the cosmological horizon).  series_order = 2 truncates after the quadratic
// term (negative control: slope drops to ~3).
inline ExpansionReport expansion_check(const ModelParams& p, double r_lo = 1e-3,
                                       double r_hi = 1e-1, int series_order = 4,
                                       const ToleranceConfig& tol = ToleranceConfig::defaults()) {
  if (p.n != 3) throw std::domain_error("expansion_check: implemented for n = 3");
  if (p.m <= 0.0 || p.at_m_max())
    throw std::domain_error("expansion_check: requires 0 < m < m_max");
  SigmaGeometry sg = sigma_geometry(p);
  double um = u_max(p), H = sg.H, hn2 = sg.h_traceless_norm * sg.h_traceless_norm;
  int n = p.n;
  ProperLengthMap map(p, tol);
  double s0 = map.s_of_r(photon_radius(p));
  auto series = [&](double dd) {
    double v = 1.0 - 0.5 * n * dd * dd;
    if (series_order >= 3) v += n / 6.0 * H * dd * dd * dd;
    if (series_order >= 4)
      v -= 1.0 / 24.0 *
           (2.0 * n * hn2 + double(n) * (n + 1) * H * H / (n - 1) - double(n) * n) * dd * dd * dd *
           dd;
    return um * v;
  };
  const int K = 25;
  ExpansionReport rep;
  std::vector<double> lx, ly;
  for (int k = 0; k < K; ++k) {
    double dd = r_lo * std::pow(r_hi / r_lo, double(k) / (K - 1));
    for (double sgn : {1.0, -1.0}) {
      double dsg = sgn * dd;
      double ue = std::sqrt(std::max(0.0, f_m(p, map.r_of_s(s0 + dsg))));
      double dev = std::abs(ue - series(dsg));
      rep.max_residual = std::max(rep.max_residual, dev / std::pow(dd, 5));
      lx.push_back(std::log(dd));
      ly.push_back(std::log(std::max(dev, 1e-300)));
    }
  }
  // least-squares slope of log(dev) against log(d)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
  }
  double nn = double(lx.size());
  rep.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  double dd = 1e-4;
  rep.curvature_coeff =
      (std::sqrt(f_m(p, map.r_of_s(s0 + dd))) + std::sqrt(f_m(p, map.r_of_s(s0 - dd))) - 2.0 * um) /
      (dd * dd);
  rep.pass = rep.slope >= rep.tolerance;
  return rep;
}

// Limit of |Du|^2 / (u_max - u) approaching the maximum set, by linear
// extrapolation in the distance to the (parabolically refined) maximum.
// A maximum at a coordinate-center endpoint (warp -> 0) counts as interior.
inline double lojasiewicz_limit(const WarpedProfile& p, int stencil_order = 2) {
  p.validate();
  detail::DerivOps d(p, stencil_order);
  size_t N = p.size();
  size_t imax = size_t(std::max_element(p.u.begin(), p.u.end()) - p.u.begin());
  bool center_end = false;
  if (imax == 0 || imax == N - 1) {
    // Tolerate a coordinate-origin endpoint where the fiber degenerates.
    double wend = p.warp[imax];
    if (std::abs(wend) < 1e-8 * (1.0 + p.warp[N / 2]))
      center_end = true;
    else
      throw std::domain_error("lojasiewicz_limit: potential maximum lies on the boundary");
  }
  // Parabolic refinement of the maximum location and value.
  double h = d.spacing();
  double smax = p.coord[imax], umax = p.u[imax];
  if (!center_end && imax > 0 && imax + 1 < N) {
    double um1 = p.u[imax - 1], u0 = p.u[imax], up1 = p.u[imax + 1];
    double denom = um1 - 2.0 * u0 + up1;
    if (denom < 0.0) {
      double delta = 0.5 * (um1 - up1) / denom;
      smax = p.coord[imax] + delta * h;
      umax = u0 - 0.25 * (um1 - up1) * delta;
    }
  }
  // Ratio samples at graded signed distances on both available sides; the
  // ratio is smooth through the maximum, so extrapolate with a least-squares
  // cubic in the signed distance and report the constant term.
  std::vector<double> xs, ys;
  auto push = [&](size_t i) {
    if (i < 2 || i + 2 >= N) return;
    double du = p.du.empty() ? d.d1s(p.u, i) : p.du[i];
    double gap = umax - p.u[i];
    if (gap <= 0.0) return;
    double dist = p.chart == Chart::AreaRadius ? p.coord[i] - p.coord[imax] : p.coord[i] - smax;
    xs.push_back(dist);
    ys.push_back(du * du / gap);
  };
  for (int k = 6; k <= 20; ++k) {
    if (imax >= size_t(k)) push(imax - k);
    if (imax + k < N) push(imax + k);
  }
  if (xs.size() < 8) throw ResolutionError("lojasiewicz_limit: too few usable samples");
  // Normal equations for y ~ sum c_j x^j, j = 0..3, with x scaled to [-1, 1].
  double scale = 0.0;
  for (double x : xs) scale = std::max(scale, std::abs(x));
  constexpr int deg = 3;
  double A[deg + 1][deg + 2] = {};
  for (size_t i = 0; i < xs.size(); ++i) {
    double pw[2 * deg + 1] = {1.0};
    double x = xs[i] / scale;
    for (int j = 1; j <= 2 * deg; ++j) pw[j] = pw[j - 1] * x;
    for (int r = 0; r <= deg; ++r) {
      for (int c = 0; c <= deg; ++c) A[r][c] += pw[r + c];
      A[r][deg + 1] += pw[r] * ys[i];
    }
  }
  for (int c = 0; c <= deg; ++c) {  // Gaussian elimination, partial pivoting
    int piv = c;
    for (int r = c + 1; r <= deg; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap_ranges(A[c], A[c] + deg + 2, A[piv]);
    for (int r = 0; r <= deg; ++r) {
      if (r == c) continue;
      double fac = A[r][c] / A[c][c];
      for (int k = c; k <= deg + 1; ++k) A[r][k] -= fac * A[c][k];
    }
  }
  return A[0][deg + 1] / A[0][0];
}

// Flux of |grad phi|_g through the level fibers, in the conformal area
// element: Phi(s) = |grad phi|_g * fiber_area_normalization * B^{n-1}, with
// B the conformal fiber radius.  Evaluated at the grid sample nearest to each
// requested s (model data are exact at samples).
inline std::vector<double> phi_flux(const WarpedProfile& p, const PseudoRadialBranch& br,
                                    const std::vector<double>& s_grid, double du_scale = 1.0,
                                    int stencil_order = 2) {
  p.validate();
  detail::DerivOps d(p, stencil_order);
  size_t N = p.size();
  std::vector<double> out;
  out.reserve(s_grid.size());
  int n = p.n;
  double cyl_scale = std::sqrt(double(n) / (n - 2));
  // Recover psi from the chart coordinate where possible: inverting u is
  // ill-conditioned near its maximum.
  std::optional<ProperLengthMap> map;
  if (br.branch() != Region::Cylindrical && p.params && p.chart == Chart::ProperDistance &&
      !p.params->at_m_max())
    map.emplace(*p.params);
  double r_zero = br.r_zero();
  for (double s : s_grid) {
    if (s < p.coord.front() - 1e-12 || s > p.coord.back() + 1e-12)
      throw std::domain_error("phi_flux: s outside the profile range");
    size_t i = size_t(std::lower_bound(p.coord.begin(), p.coord.end(), s) - p.coord.begin());
    if (i > 0 && (i == N || s - p.coord[i - 1] < p.coord[i] - s)) --i;
    double du = (p.du.empty() ? std::abs(d.d1s(p.u, std::clamp<size_t>(i, 2, N - 3))) : p.du[i]) *
                du_scale;
    double grad, B;
    if (br.branch() == Region::Cylindrical) {
      grad = br.grad_phi_norm(p.u[i], du);
      B = cyl_scale * p.warp[i];
    } else {
      double psi = map ? map->r_of_s(p.coord[i])
                       : (p.chart == Chart::AreaRadius ? p.coord[i] : br.psi_of_u(p.u[i]));
      double denom = std::abs(psi * (1.0 - std::pow(r_zero / psi, n)));
      grad = du / denom;
      B = p.warp[i] / psi;
    }
    out.push_back(grad * p.fiber_area_normalization * std::pow(B, n - 1));
  }
  return out;
}

// Residuals of the conformally reformulated system: the Delta_g phi equation,
// the scalar-curvature trace identity, and the Bochner identity in integrated
// (flux) form.  Evaluated on the branch side of the maximum, excluding both
// the 2.5% endpoint margin and the degenerate collar u > 0.9 u_max where the
// pseudo-radial composition amplifies stencil noise.
inline std::vector<IdentityReport> conformal_identity_residuals(
    const WarpedProfile& p, const PseudoRadialBranch& br, double tol = 1e-6,
    int stencil_order = 2) {
  p.validate();
  detail::DerivOps d(p, stencil_order);
  size_t N = p.size(), mgn = detail::margin_count(p);
  if (N < 2 * mgn + 5) throw ResolutionError("too few samples for interior residual window");
  int n = p.n;
  size_t imax = size_t(std::max_element(p.u.begin(), p.u.end()) - p.u.begin());
  double u_cut = 0.9 * p.u[imax];
  bool cyl = br.branch() == Region::Cylindrical;
  bool left_side = br.branch() == Region::Inner || cyl;
  size_t lo = left_side ? mgn : std::max(imax, mgn);
  size_t hi = left_side ? std::min(imax, N - mgn) : N - mgn;

  std::vector<IdentityReport> reps(3);
  reps[0].name = "conformal_laplacian";
  reps[1].name = "conformal_trace";
  reps[2].name = "conformal_bochner_flux";
  for (auto& r : reps) r.tolerance = tol;

  // Per-sample fields of the conformal picture: the metric g is again a
  // warped product over tau with dtau = ds / Psi and fiber radius B = b/Psi.
  // Only u and the warp are differenced; psi and phi enter through their
  // closed-form u-derivatives (chain rule), which keeps the composition from
  // amplifying stencil noise.
  const double cyl_warp = std::sqrt(double(n - 2) / n);
  const double sqn2 = std::sqrt(double(n - 2));
  const double mpar = br.params().m;
  struct F {
    double u, ps, phi, phit, phitt, Bt, B, G, Gt, lap, psi_over_psidot;
    double psi_s_over_psi, lnpsi_ss;
  };
  auto fields = [&](size_t i) {
    F f{};
    double u = std::min(p.u[i], br.u_top());
    double us = d.d1s(p.u, i), uss = d.d2s(p.u, i);
    double b = p.warp[i], bs = d.d1s(p.warp, i);
    double phi_u, phi_uu, psis, psiss, ps;
    if (cyl) {
      ps = cyl_warp;
      double c2 = std::max(1e-300, (1.0 - u) * (1.0 + u));
      f.phi = std::asin(std::clamp(u, 0.0, 1.0)) / sqn2;
      phi_u = 1.0 / (sqn2 * std::sqrt(c2));
      phi_uu = u / (sqn2 * c2 * std::sqrt(c2));
      psis = psiss = 0.0;
    } else {
      ps = br.psi_of_u(u);
      double h = 1.0 - (n - 2) * mpar * std::pow(ps, -n);
      double pd = -u / (ps * h);  // psi-dot
      double pdd = u > 0.0
                       ? n * pd * pd * pd / u + (n - 1) * pd * pd / ps + pd / u
                       : -1.0 / (ps * h);
      phi_u = 1.0 / (ps * ps * h);
      phi_uu = n * u / (std::pow(ps, 4) * h * h * h) -
               (n - 2) * u / (std::pow(ps, 4) * h * h);
      psis = pd * us;
      psiss = pdd * us * us + pd * uss;
      f.psi_over_psidot = u > 0.0 ? -ps * ps * h / u : 0.0;
      f.phi = 0.0;  // not needed on the non-degenerate branches
    }
    double phis = phi_u * us, phiss = phi_uu * us * us + phi_u * uss;
    f.u = u;
    f.ps = ps;
    f.phit = ps * phis;
    f.phitt = ps * (psis * phis + ps * phiss);
    f.B = b / ps;
    f.Bt = bs - b * psis / ps;
    f.G = f.phit * f.phit;  // |grad phi|_g^2
    f.Gt = 2.0 * f.phit * f.phitt;
    f.lap = f.phitt + (n - 1) * (f.Bt / f.B) * f.phit;
    // psi s-derivatives for the trace identity
    f.psi_s_over_psi = psis / ps;
    f.lnpsi_ss = psiss / ps - (psis / ps) * (psis / ps);
    return f;
  };

  // Window indices with full stencil halos.
  size_t a = std::max(lo, d.halo()), b = std::min(hi, N - 1 - d.halo());
  std::vector<size_t> win;
  for (size_t i = a; i <= b; ++i)
    if (p.u[i] <= u_cut) win.push_back(i);
  if (win.size() < 5) throw ResolutionError("conformal window too small");

  for (size_t i : win) {
    auto f = fields(i);
    double loc = p.coord[i];
    double R0 = (n - 1) *
                    (p.fiber_einstein_constant - (n - 2) * std::pow(d.d1s(p.warp, i), 2)) /
                    (p.warp[i] * p.warp[i]) -
                2.0 * (n - 1) * d.d2s(p.warp, i) / p.warp[i];
    if (cyl) {
      double rhs = -sqn2 * std::tan(sqn2 * f.phi) * (1.0 - f.G);
      detail::bump_report(reps[0], f.lap - rhs, loc);
      // R_g is constant (n-1)(n-2) for the cylindrical conformal metric.
      double Rg = cyl_warp * cyl_warp * R0;
      detail::bump_report(reps[1], Rg - (n - 1) * (n - 2), loc);
    } else {
      double psidot = f.psi_over_psidot != 0.0 ? f.ps / f.psi_over_psidot : 0.0;
      double rhs = n * f.ps * psidot * (1.0 - f.G);
      detail::bump_report(reps[0], f.lap - rhs, loc);
      // Trace identity through the conformal-change formula for R_g.
      double dlnpsi = f.psi_s_over_psi;
      double lap0_lnpsi = f.lnpsi_ss + (n - 1) * (d.d1s(p.warp, i) / p.warp[i]) * dlnpsi;
      double Rg = f.ps * f.ps *
                  (R0 + 2.0 * (n - 1) * lap0_lnpsi - (n - 1) * (n - 2) * dlnpsi * dlnpsi);
      double rhs_tr =
          (n - 1) * (n - 2) *
          (1.0 - (1.0 + (2.0 * n * f.u * f.ps * psidot - n * f.ps * f.ps) / (n - 2)) * (1.0 - f.G));
      detail::bump_report(reps[1], Rg - rhs_tr, loc);
    }
  }

  // Bochner identity, integrated form over the window [win.front(), win.back()]:
  //   [B^{n-1}(G_tau - 2 lap*phi_tau)]_a^b
  //     = int 2(|Hess phi|^2 + Ric_g(grad phi, grad phi) - lap^2) B^{n-1} dtau.
  {
    auto boundary_term = [&](size_t i) {
      auto f = fields(i);
      return std::pow(f.B, n - 1) * (f.Gt - 2.0 * f.lap * f.phit);
    };
    auto integrand = [&](size_t i) {
      auto f = fields(i);
      double hess2 = f.phitt * f.phitt + (n - 1) * std::pow(f.Bt * f.phit / f.B, 2);
      double ric;
      if (cyl) {
        double xi = sqn2 * f.phi;
        ric = sqn2 * (std::cos(xi) / std::sin(xi)) * f.phitt * f.phit * f.phit -
              (n - 2) * f.G * f.G + (n - 2) * f.G;
      } else {
        ric = -((n - 2) * f.u + f.psi_over_psidot) * f.phitt * f.phit * f.phit -
              (n - 2) * f.G * f.G +
              ((n - 2) * f.G - (f.u - f.psi_over_psidot) * f.lap) * f.G;
      }
      // dtau = ds / Psi
      return 2.0 * (hess2 + ric - f.lap * f.lap) * std::pow(f.B, n - 1) / f.ps;
    };
    // Contiguity: restrict to the largest contiguous run of window indices.
    size_t runA = win.front(), runB = runA;
    size_t bestA = runA, bestB = runA;
    for (size_t k = 1; k < win.size(); ++k) {
      if (win[k] == win[k - 1] + 1) {
        runB = win[k];
      } else {
        if (runB - runA > bestB - bestA) { bestA = runA; bestB = runB; }
        runA = runB = win[k];
      }
    }
    if (runB - runA > bestB - bestA) { bestA = runA; bestB = runB; }
    double hst = d.spacing();
    // composite Simpson in s (pairs of cells), trapezoid for a leftover cell;
    // in the AreaRadius chart ds = dr / u.
    double I = 0.0;
    size_t i = bestA;
    std::vector<double> vals(bestB - bestA + 1);
    for (size_t k = bestA; k <= bestB; ++k) {
      vals[k - bestA] = integrand(k);
      if (p.chart == Chart::AreaRadius) vals[k - bestA] /= std::max(p.u[k], 1e-300);
    }
    while (i + 2 <= bestB) {
      I += hst / 3.0 * (vals[i - bestA] + 4.0 * vals[i + 1 - bestA] + vals[i + 2 - bestA]);
      i += 2;
    }
    if (i < bestB) I += 0.5 * hst * (vals[i - bestA] + vals[i + 1 - bestA]);
    double lhsv = boundary_term(bestB) - boundary_term(bestA);
    reps[2].max_residual = std::abs(lhsv - I);
    reps[2].location = p.coord[(bestA + bestB) / 2];
  }

  for (auto& r : reps) r.pass = r.max_residual < r.tolerance;
  return reps;
}

struct MeanCurvaturePair {
  double H = 0.0;    // mean curvature of the level fiber in the static metric
  double H_g = 0.0;  // mean curvature in the conformal metric
  bool critical_level = false;  // |Du| = 0 away from the maximum set
  double consistency = 0.0;     // |direct - relation| cross-check
};

// Mean curvatures of the fiber at proper position s, linearly interpolated
// between the two bracketing grid samples.
inline MeanCurvaturePair mean_curvature_pair(const WarpedProfile& p, double s,
                                             int stencil_order = 2,
                                             const ToleranceConfig& tol = ToleranceConfig::defaults()) {
  p.validate();
  if (!p.params) throw std::invalid_argument("mean_curvature_pair: profile lacks model parameters");
  detail::DerivOps d(p, stencil_order);
  size_t N = p.size();
  int n = p.n;
  size_t imax = size_t(std::max_element(p.u.begin(), p.u.end()) - p.u.begin());
  size_t i1 = size_t(std::lower_bound(p.coord.begin(), p.coord.end(), s) - p.coord.begin());
  i1 = std::clamp<size_t>(i1, d.halo() + 1, N - 1 - d.halo());
  size_t i0 = i1 - 1;
  double t = std::clamp((s - p.coord[i0]) / (p.coord[i1] - p.coord[i0]), 0.0, 1.0);

  bool cylp = p.cylindrical || p.params->at_m_max();
  const double cyl_warp = std::sqrt(double(n - 2) / n);
  // Pseudo-radius along the profile.  Inverting u is ill-conditioned near the
  // maximum (dpsi/du blows up), but for these profiles psi coincides with the
  // chart radius, which the proper-length map recovers stably from the
  // coordinate alone.
  std::optional<ProperLengthMap> map;
  double r_zero = 0.0;
  if (!cylp) {
    if (p.chart == Chart::ProperDistance) map.emplace(*p.params, tol);
    r_zero = p.params->m > 0.0 ? photon_radius(*p.params) : 0.0;
  }
  auto psi_at = [&](size_t i) {
    return p.chart == Chart::AreaRadius ? p.coord[i] : map->r_of_s(p.coord[i]);
  };

  MeanCurvaturePair out;
  double consistency = 0.0;
  auto at = [&](size_t i) {
    struct V { double H, Hg, us; } v{};
    auto [b, bs, bss] = detail::warp_derivs(p, d, i);
    (void)bss;
    v.H = (n - 1) * bs / b;
    v.us = p.du.empty() ? d.d1s(p.u, i) : p.du[i];
    if (cylp) {
      v.Hg = cyl_warp * v.H;
      return v;
    }
    double ps = psi_at(i);
    // |psi-dot| = u / (psi |1 - (r_0/psi)^n|), the reciprocal of |f'|/2
    double hh = 1.0 - std::pow(r_zero / ps, n);
    double psis = p.u[i] / (ps * std::abs(hh)) * std::abs(d.d1s(p.u, i));
    v.Hg = ps * v.H - (n - 1) * psis;
    // direct conformal route: H_g = (n-1) psi d(ln(b/psi))/ds, with psi
    // differenced rather than chained through u
    double psis_fd;
    if (p.chart == Chart::AreaRadius) {
      psis_fd = p.u[i];  // d(coord)/ds = u
    } else {
      double psiloc[5];
      for (int k = -2; k <= 2; ++k) psiloc[k + 2] = psi_at(i + k);
      psis_fd = (psiloc[0] - 8.0 * psiloc[1] + 8.0 * psiloc[3] - psiloc[4]) /
                (12.0 * d.spacing());
    }
    double direct = (n - 1) * ps * (bs / b - psis_fd / ps);
    consistency = std::max(consistency, std::abs(direct - v.Hg));
    return v;
  };
  auto v0 = at(i0), v1 = at(i1);
  out.H = (1.0 - t) * v0.H + t * v1.H;
  out.H_g = (1.0 - t) * v0.Hg + t * v1.Hg;
  out.consistency = consistency;
  double us = (1.0 - t) * v0.us + t * v1.us;
  if (std::abs(us) < 1e-10 &&
      std::abs(0.5 * double(i0 + i1) - double(imax)) > 2.0)
    out.critical_level = true;
  return out;
}

// Sigma geometry recovered from profile samples at the potential maximum
// (finite-difference counterpart of sigma_geometry).
inline SigmaGeometry sigma_from_profile(const WarpedProfile& p, int stencil_order = 2) {
  p.validate();
  detail::DerivOps d(p, stencil_order);
  size_t N = p.size();
  size_t i = size_t(std::max_element(p.u.begin(), p.u.end()) - p.u.begin());
  i = std::clamp<size_t>(i, d.halo() + 1, N - 2 - d.halo());
  int n = p.n;
  // refine the location of the maximum of u with the parabola vertex,
  // then interpolate the warp data quadratically at that point
  double h = d.spacing();
  double um = p.u[i - 1], u0 = p.u[i], up = p.u[i + 1];
  double denom = um - 2.0 * u0 + up;
  double delta = std::abs(denom) > 0.0 ? std::clamp(0.5 * h * (um - up) / denom, -h, h) : 0.0;
  double b = 0.0, bs = 0.0, bss = 0.0;
  {
    double wq[3] = {0.5 * (delta / h) * (delta / h - 1.0),
                    1.0 - (delta / h) * (delta / h),
                    0.5 * (delta / h) * (delta / h + 1.0)};
    for (int k = -1; k <= 1; ++k) {
      auto [bk, bsk, bssk] = detail::warp_derivs(p, d, i + k);
      b += wq[k + 1] * bk;
      bs += wq[k + 1] * bsk;
      bss += wq[k + 1] * bssk;
    }
  }
  SigmaGeometry sg{};
  sg.H = (n - 1) * bs / b;
  sg.h_traceless_norm = 0.0;  // warped-product fibers are umbilic
  sg.R_sigma = (n - 1) * p.fiber_einstein_constant / (b * b);
  sg.ric_nn = -(n - 1) * bss / b;
  sg.area = p.fiber_area_normalization * std::pow(b, n - 1);
  return sg;
}

}  // namespace kottler

#endif  // KOTTLER_GEOMETRY_HPP_
