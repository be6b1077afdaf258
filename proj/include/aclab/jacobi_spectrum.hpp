#pragma once

#include <utility>
#include <vector>

#include "aclab/cone_profile.hpp"

namespace aclab {

// Principal eigenpair of the Jacobi operator on the spherical section
// {theta in [theta_fb, pi/2]} with weight w = cos^{m-1} sin^{k-1}:
//
//   (w phi')' = lambda w phi,   phi'(theta_fb) + H phi(theta_fb) = 0,
//
// natural closure at the degenerate endpoint pi/2.  lambda = -inf Q over the
// Rayleigh quotient Q(f) = (∫ f'^2 w - H f(t0)^2 w(t0)) / ∫ f^2 w, and the
// decay exponents solve gamma (gamma - d + 2) + lambda = 0.
struct EigenResult {
  double lambda = 0.0;
  double certified_error = 0.0;  // |lambda_{2n} - lambda_n|
  double gamma_minus = 0.0;
  double gamma_plus = 0.0;
  double robin_residual = 0.0;
  std::vector<double> thetas;  // finer grid (2n+1 nodes)
  std::vector<double> phi;     // eigenfunction, positive, sup-normalized
  std::vector<std::pair<int, double>> resolutions;  // (n, lambda_n)
};

struct QuotientSample {
  std::vector<double> f;
  double value = 0.0;
};

EigenResult principal_eigenvalue(const ConeProfile& p, int n = 4096, double target_error = 5e-4);

// Discrete Rayleigh quotient of uniform samples f on [theta_fb, pi/2].
QuotientSample rayleigh_quotient(const ConeProfile& p, const std::vector<double>& f);

// Roots of gamma (gamma - d + 2) + lambda = 0, smaller first; evaluated
// cancellation-safely (smaller root = lambda / larger root).
std::pair<double, double> gamma_roots(double lambda, int d);

// Reference values for the axially symmetric cone, d = 7..14.
double reference_lambda(int d);
double reference_gamma(int d);

struct TableRow {
  int d = 0, m = 0, k = 0;
  double theta_fb = 0.0, H = 0.0, lambda = 0.0, gamma = 0.0;
  double table_delta = 0.0;   // lambda - reference_lambda(d)
  double certified = 0.0;
  bool matched = false;       // |table_delta| <= 0.05
  bool selected = false;      // best match for its dimension
};

// Enumerate splits per dimension, compute eigenvalues, and mark the rows
// matching the reference table; throws NoMatch when a dimension has none.
std::vector<TableRow> golden_table(int d_min, int d_max, int n = 4096);

// Separated-field residual: builds omega(r,theta) = r^{-gamma} phi(theta) on
// an (r,theta) grid over r in [1,4] and returns the max of the interior
// discrete Laplace residual and the deviation of r^gamma I(r) from I(1),
// I(r) = ∫ omega(r theta) phi(theta) w dtheta.
double jacobi_field_residual(const ConeProfile& p, const EigenResult& eig);
double jacobi_field_residual(const ConeProfile& p, const EigenResult& eig, double gamma);

}  // namespace aclab
