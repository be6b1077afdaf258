#pragma once

#include <vector>

#include "aclab/symmetry.hpp"

namespace aclab {

// One-homogeneous O(m) x O(k) invariant cone candidate U(x) = r g(theta),
// positive on {theta > theta_fb}, normalized to g(theta_fb) = 0 and
// g'(theta_fb) = 1 so that |grad U| = 1 on the free boundary.
//
// g solves  g'' + [(k-1)cot(theta) - (m-1)tan(theta)] g' + (d-1) g = 0
// (harmonicity of the degree-1 homogeneous extension), with the smooth
// closure g'(pi/2) = 0 at the pole {x' = 0}.
struct ConeProfile {
  int d = 0;
  SymmetrySplit split;
  double theta_fb = 0.0;       // free-boundary angle in [0, pi/2)
  double theta_tol = 0.0;      // certified bracketing tolerance for theta_fb
  double H = 0.0;              // mean curvature of the free boundary at r = 1
  double weiss_density = 0.0;  // |{U > 0} ∩ B_1|
  bool admissible = false;     // H >= 0 and g > 0 on the open section

  std::vector<double> thetas;  // uniform samples on [theta_fb, pi/2]
  std::vector<double> g;
  std::vector<double> g_prime;

  double spacing() const { return thetas.size() > 1 ? thetas[1] - thetas[0] : 0.0; }
  bool flat() const { return theta_fb == 0.0 && split.k == 1; }

  // cubic Hermite interpolation off the sample grid (error O(spacing^4))
  double g_at(double theta) const;
  double g_prime_at(double theta) const;

  // U at a quarter-plane point; zero on {theta < theta_fb} and at the origin
  double evaluate(double rho, double sigma) const;
};

struct SectionIntegrals {
  double hessian_sq = 0.0;       // ∫_{{U>0}^S} |D^2 U|^2
  double mean_curv_total = 0.0;  // ∫_{Γ(U)^S} H
  double section_area = 0.0;     // surface measure of {U>0}^S
};

struct ShootOptions {
  double tol = 1e-10;     // certified tolerance on theta_fb
  int samples = 4096;     // intervals of the stored sample grid
  int max_halvings = 14;  // step-halving budget for certification
};

// Integrate the angular ODE from the pole toward theta = 0, locate the first
// zero, certify it by step halving, and sample the rescaled profile.
// Throws NoZeroCrossing when the split admits no cone of this ansatz and
// NonConvergent when halving fails to certify tol.
ConeProfile shoot_profile(int d, SymmetrySplit split, double tol = 1e-10, int samples = 4096);
ConeProfile shoot_profile(int d, SymmetrySplit split, const ShootOptions& opts);

// Section integrals of the Hessian and the free-boundary mean curvature, by
// weighted 1-D quadrature of the orthonormal-frame components
//   D2U(e_t,e_t) = g'' + g,   (k-1) x (cot g' + g),   (m-1) x (g - tan g'),
// radial components zero; their sum is the ODE left side (trace identity).
SectionIntegrals section_integrals(const ConeProfile& p, double tol = 1e-9);

// |{U>0} ∩ B_1| = (1/d) |{U>0}^S|, plus the independent energy-route
// evaluation E(U;B_1) - ∫_{∂B_1} U^2; the two must agree to `agree_tol`.
double weiss_density_value(const ConeProfile& p, double agree_tol = 1e-8);

// Max pointwise finite-difference residual of the angular ODE over interior
// samples; independent of the integrator (uses centered differences of g).
double ode_residual_max(const ConeProfile& p);

// Max over samples of |grad U|^2 = g^2 + g'^2 on the unit sphere.
double gradient_sq_max(const ConeProfile& p);

// -g''(theta_fb) estimated by one-sided finite differences from the samples;
// agrees with the stored H (which uses the ODE value) for valid profiles.
double mean_curvature_fd(const ConeProfile& p);

}  // namespace aclab
