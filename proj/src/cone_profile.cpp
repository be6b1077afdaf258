#include "aclab/cone_profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aclab {

namespace {

struct OdeState {
  double h;
  double hp;
};

// h'' = -c(theta) h' - (d-1) h with c = (k-1)cot - (m-1)tan
struct AngularOde {
  int d;
  SymmetrySplit split;

  OdeState deriv(double theta, const OdeState& y) const {
    return {y.hp, -split.weight_coef(theta) * y.hp - (d - 1) * y.h};
  }

  OdeState rk4(double theta, const OdeState& y, double dt) const {
    OdeState k1 = deriv(theta, y);
    OdeState k2 = deriv(theta + dt / 2, {y.h + dt / 2 * k1.h, y.hp + dt / 2 * k1.hp});
    OdeState k3 = deriv(theta + dt / 2, {y.h + dt / 2 * k2.h, y.hp + dt / 2 * k2.hp});
    OdeState k4 = deriv(theta + dt, {y.h + dt * k3.h, y.hp + dt * k3.hp});
    return {y.h + dt / 6 * (k1.h + 2 * k2.h + 2 * k3.h + k4.h),
            y.hp + dt / 6 * (k1.hp + 2 * k2.hp + 2 * k3.hp + k4.hp)};
  }

  // integrate from (from, y) down to `to` with at least nsub substeps
  OdeState run_down(double from, OdeState y, double to, int nsub) const {
    double span = from - to;
    if (span <= 0) return y;
    int n = std::max(1, nsub);
    double dt = -span / n;
    double theta = from;
    for (int i = 0; i < n; ++i) {
      y = rk4(theta, y, dt);
      theta += dt;
    }
    return y;
  }
};

// Regular series at the pole theta = pi/2 in s = pi/2 - theta:
// h(s) = 1 + a2 s^2 + a4 s^4 + a6 s^6 + O(s^8), even by smoothness across {x'=0}.
struct PoleSeries {
  double a2, a4, a6;

  PoleSeries(int d, const SymmetrySplit& s) {
    const double m = s.m, k = s.k;
    a2 = -(d - 1) / (2.0 * m);
    a4 = a2 * (2.0 * (m - 1) / 3.0 + k - m - 1) / (4.0 * (m + 2));
    a6 = (a4 * (4.0 * (m - 1) / 3.0 + 4 * k - 4 - d + 1) +
          a2 * (2.0 * (m - 1) / 45.0 + 2.0 * (k - 1) / 3.0)) /
         (6.0 * (m + 4));
  }

  double value(double s) const { return 1 + s * s * (a2 + s * s * (a4 + s * s * a6)); }
  // dh/dtheta = -dh/ds
  double slope(double s) const { return -s * (2 * a2 + s * s * (4 * a4 + s * s * 6 * a6)); }
};

constexpr double kSeriesOffset = 1e-6;

struct MarchResult {
  bool crossed = false;
  double theta_fb = 0.0;
  double bracket_width = 0.0;
  double h_at_end = 0.0;  // value at the lower end when no crossing
};

// March downward from the series start with steps <= base, bracketing the
// first sign change of h and bisecting it to below `width_target`.
MarchResult march(const AngularOde& ode, const PoleSeries& series, double base,
                  double width_target) {
  const double theta_start = M_PI / 2 - kSeriesOffset;
  const double theta_min = (ode.split.k == 1) ? 0.0 : 1e-7;
  double theta = theta_start;
  OdeState y{series.value(kSeriesOffset), series.slope(kSeriesOffset)};

  while (theta > theta_min) {
    double step = base;
    if (ode.split.k > 1) step = std::min(step, std::max(theta / 8.0, 1e-8));
    step = std::min(step, theta - theta_min);
    OdeState ynext = ode.rk4(theta, y, -step);
    double tnext = theta - step;
    if (ynext.h <= 0.0) {
      // bracket [tnext, theta]; bisection re-integrates from the stored state
      double lo = tnext, hi = theta;
      while (hi - lo > width_target) {
        double mid = 0.5 * (lo + hi);
        OdeState ymid = ode.run_down(theta, y, mid, 64);
        if (ymid.h <= 0.0)
          lo = mid;
        else
          hi = mid;
      }
      MarchResult r;
      r.crossed = true;
      r.theta_fb = 0.5 * (lo + hi);
      r.bracket_width = hi - lo;
      return r;
    }
    theta = tnext;
    y = ynext;
  }
  MarchResult r;
  r.h_at_end = y.h;
  return r;
}

template <class F>
double simpson(F&& f, double a, double b, int n) {
  // n even
  double dt = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * dt) * (i % 2 ? 4.0 : 2.0);
  return acc * dt / 3.0;
}

template <class F>
double simpson_refined(F&& f, double a, double b, double tol, const char* what) {
  int n = 512;
  double prev = simpson(f, a, b, n);
  for (n *= 2; n <= (1 << 21); n *= 2) {
    double cur = simpson(f, a, b, n);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  fail(ErrorKind::QuadratureFailure, std::string(what) + " did not settle under refinement");
}

}  // namespace

double ConeProfile::g_at(double theta) const {
  const int n = static_cast<int>(thetas.size()) - 1;
  const double dt = spacing();
  double t = std::clamp(theta, theta_fb, M_PI / 2);
  int j = std::min(static_cast<int>((t - theta_fb) / dt), n - 1);
  double u = (t - thetas[j]) / dt;
  double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  double h10 = u * (1 - u) * (1 - u);
  double h01 = u * u * (3 - 2 * u);
  double h11 = u * u * (u - 1);
  return h00 * g[j] + h10 * dt * g_prime[j] + h01 * g[j + 1] + h11 * dt * g_prime[j + 1];
}

double ConeProfile::g_prime_at(double theta) const {
  const int n = static_cast<int>(thetas.size()) - 1;
  const double dt = spacing();
  double t = std::clamp(theta, theta_fb, M_PI / 2);
  int j = std::min(static_cast<int>((t - theta_fb) / dt), n - 1);
  double u = (t - thetas[j]) / dt;
  double dh00 = 6 * u * (u - 1) / dt;
  double dh10 = (3 * u - 1) * (u - 1);
  double dh01 = -6 * u * (u - 1) / dt;
  double dh11 = u * (3 * u - 2);
  return dh00 * g[j] + dh10 * g_prime[j] + dh01 * g[j + 1] + dh11 * g_prime[j + 1];
}

double ConeProfile::evaluate(double rho, double sigma) const {
  double r = std::hypot(rho, sigma);
  if (r == 0.0) return 0.0;
  double theta = std::atan2(std::abs(sigma), std::abs(rho));
  if (theta <= theta_fb) return 0.0;
  return r * g_at(theta);
}

ConeProfile shoot_profile(int d, SymmetrySplit split, double tol, int samples) {
  ShootOptions opts;
  opts.tol = tol;
  opts.samples = samples;
  return shoot_profile(d, split, opts);
}

ConeProfile shoot_profile(int d, SymmetrySplit split, const ShootOptions& opts) {
  validate_split(d, split);
  if (!(opts.tol > 0)) fail(ErrorKind::InvalidConfig, "tol must be positive");
  if (opts.samples < 16) fail(ErrorKind::InvalidConfig, "need at least 16 sample intervals");

  AngularOde ode{d, split};
  PoleSeries series(d, split);
  const double width_target = std::max(opts.tol * 1e-3, 1e-15);

  // locate the zero, certified by step halving
  double base = M_PI / 2 / 512.0;
  MarchResult cur = march(ode, series, base, width_target);
  bool flat = false;
  double theta_fb = 0.0, cert = 0.0;
  if (!cur.crossed) {
    if (split.k == 1 && std::abs(cur.h_at_end) <= 1e-8) {
      flat = true;  // profile closes exactly at theta = 0: the flat cone
    } else {
      fail(ErrorKind::NoZeroCrossing,
           "split (" + std::to_string(split.m) + "," + std::to_string(split.k) +
               ") admits no cone of this ansatz");
    }
  } else {
    bool certified = false;
    for (int i = 0; i < opts.max_halvings; ++i) {
      MarchResult fine = march(ode, series, base / 2, width_target);
      if (!fine.crossed) break;
      if (std::abs(fine.theta_fb - cur.theta_fb) <= opts.tol) {
        theta_fb = fine.theta_fb;
        cert = std::max(std::abs(fine.theta_fb - cur.theta_fb), fine.bracket_width);
        certified = true;
        break;
      }
      cur = fine;
      base /= 2;
    }
    if (!certified)
      fail(ErrorKind::NonConvergent, "step halving failed to certify theta_fb to tol");
    if (split.k == 1 && theta_fb < 1e-9) {
      flat = true;
      theta_fb = 0.0;
    }
  }
  if (flat) {
    theta_fb = 0.0;
    cert = opts.tol;
  }

  // sample the profile on a uniform grid, integrating node to node from the top
  ConeProfile p;
  p.d = d;
  p.split = split;
  p.theta_fb = theta_fb;
  p.theta_tol = cert;
  const int n = opts.samples;
  const double dt = (M_PI / 2 - theta_fb) / n;
  p.thetas.resize(n + 1);
  p.g.resize(n + 1);
  p.g_prime.resize(n + 1);
  for (int j = 0; j <= n; ++j) p.thetas[j] = theta_fb + j * dt;
  p.thetas[n] = M_PI / 2;

  const double substep = base / 4;
  double theta = M_PI / 2 - kSeriesOffset;
  OdeState y{series.value(kSeriesOffset), series.slope(kSeriesOffset)};
  p.g[n] = 1.0;
  p.g_prime[n] = 0.0;
  for (int j = n - 1; j >= 0; --j) {
    double target = p.thetas[j];
    int nsub = std::max(4, static_cast<int>(std::ceil((theta - target) / substep)));
    y = ode.run_down(theta, y, target, nsub);
    theta = target;
    p.g[j] = y.h;
    p.g_prime[j] = y.hp;
  }

  const double scale = 1.0 / p.g_prime[0];
  for (int j = 0; j <= n; ++j) {
    p.g[j] *= scale;
    p.g_prime[j] *= scale;
  }
  p.g[0] = 0.0;
  p.g_prime[0] = 1.0;

  p.H = flat ? 0.0 : split.weight_coef(theta_fb);
  double gmin = p.g[1];
  for (int j = 1; j <= n; ++j) gmin = std::min(gmin, p.g[j]);
  p.admissible = (p.H >= -1e-12) && (gmin > 0.0);
  p.weiss_density = weiss_density_value(p);
  return p;
}

double weiss_density_value(const ConeProfile& p, double agree_tol) {
  const SymmetrySplit& s = p.split;
  const double C = section_area_constant(s);
  auto w = [&](double t) { return s.weight(t); };
  double wint = simpson_refined(w, p.theta_fb, M_PI / 2, 1e-13, "weight integral");
  double density = C * wint / p.d;

  // independent energy route: E(U;B_1) - ∫_{∂B_1} U^2
  //   = (1/d)∫(g^2+g'^2) w dA + |{U>0}∩B_1| - ∫ g^2 w dA
  // which collapses to the density for one-homogeneous critical cones;
  // serves as a quadrature self-test
  auto dirichlet = [&](double t) {
    double gg = p.g_at(t), gp = p.g_prime_at(t);
    return (gg * gg + gp * gp) * w(t);
  };
  auto l2 = [&](double t) {
    double gg = p.g_at(t);
    return gg * gg * w(t);
  };
  double dir = simpson_refined(dirichlet, p.theta_fb, M_PI / 2, 1e-13, "dirichlet integral");
  double bl2 = simpson_refined(l2, p.theta_fb, M_PI / 2, 1e-13, "boundary L2 integral");
  double energy_route = C * (dir / p.d - bl2) + density;
  if (std::abs(energy_route - density) > agree_tol * std::max(1.0, std::abs(density)))
    fail(ErrorKind::QuadratureFailure, "density and energy evaluations of W(U;0,1) disagree");
  return density;
}

SectionIntegrals section_integrals(const ConeProfile& p, double tol) {
  const SymmetrySplit& s = p.split;
  const int d = p.d;
  const double C = section_area_constant(s);
  const double g_top = p.g.back();

  // orthonormal-frame Hessian components of U = r g(theta) at r = 1; at the
  // pole tan(theta) g' has the finite limit (d-1)/m * g(pi/2)
  auto F = [&](double t) {
    if (t >= M_PI / 2 - 1e-12) {
      double cm = g_top * (1.0 - double(d - 1) / s.m);
      double ck = g_top;
      return (cm * cm + (s.k - 1) * ck * ck + (s.m - 1) * cm * cm) * s.weight(t);
    }
    double gg = p.g_at(t), gp = p.g_prime_at(t);
    double g2 = -s.weight_coef(t) * gp - (d - 1) * gg;
    double ct = (s.k > 1) ? gp / std::tan(t) + gg : gg;  // cot term absent for k = 1
    double mt = gg - ((s.m > 1) ? std::tan(t) * gp : 0.0);
    double a = g2 + gg;
    return (a * a + (s.k - 1) * ct * ct + (s.m - 1) * mt * mt) * s.weight(t);
  };

  SectionIntegrals out;
  out.hessian_sq = C * simpson_refined(F, p.theta_fb, M_PI / 2, tol, "hessian integral");
  if (p.flat()) out.hessian_sq = 0.0;  // exact: D^2 of a linear function
  out.mean_curv_total = p.H * C * s.weight(p.theta_fb);
  auto w = [&](double t) { return s.weight(t); };
  out.section_area = C * simpson_refined(w, p.theta_fb, M_PI / 2, 1e-13, "weight integral");
  if (out.hessian_sq > out.mean_curv_total + std::max(1e-6, tol * 100) * std::max(1.0, out.mean_curv_total))
    fail(ErrorKind::QuadratureFailure, "hessian integral exceeds mean curvature total");
  return out;
}

double ode_residual_max(const ConeProfile& p) {
  const int n = static_cast<int>(p.thetas.size()) - 1;
  const double dt = p.spacing();
  double worst = 0.0;
  for (int j = 1; j < n; ++j) {
    double lap = (p.g[j - 1] - 2 * p.g[j] + p.g[j + 1]) / (dt * dt);
    double drift = p.split.weight_coef(p.thetas[j]) * (p.g[j + 1] - p.g[j - 1]) / (2 * dt);
    worst = std::max(worst, std::abs(lap + drift + (p.d - 1) * p.g[j]));
  }
  return worst;
}

double gradient_sq_max(const ConeProfile& p) {
  double worst = 0.0;
  for (size_t j = 0; j < p.g.size(); ++j)
    worst = std::max(worst, p.g[j] * p.g[j] + p.g_prime[j] * p.g_prime[j]);
  return worst;
}

double mean_curvature_fd(const ConeProfile& p) {
  const double dt = p.spacing();
  return -(2 * p.g[0] - 5 * p.g[1] + 4 * p.g[2] - p.g[3]) / (dt * dt);
}

}  // namespace aclab
