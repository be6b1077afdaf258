#pragma once

#include <cmath>

#include "aclab/errors.hpp"

namespace aclab {

// O(m) x O(k) product symmetry on R^d = R^m x R^k.  Points reduce to the
// quarter plane (rho, sigma) = (|x'|, |x''|); on the unit sphere
// rho = cos(theta), sigma = sin(theta), theta in [0, pi/2].
struct SymmetrySplit {
  int m = 1;
  int k = 1;

  int d() const { return m + k; }

  // angular weight cos^{m-1} sin^{k-1}; the surface measure on S^{d-1} of a
  // symmetric set is area_constant * integral of this over theta
  double weight(double theta) const {
    return std::pow(std::cos(theta), m - 1) * std::pow(std::sin(theta), k - 1);
  }

  // (k-1) cot(theta) - (m-1) tan(theta)  (logarithmic derivative of weight)
  double weight_coef(double theta) const {
    double c = 0.0;
    if (k > 1) c += (k - 1) / std::tan(theta);
    if (m > 1) c -= (m - 1) * std::tan(theta);
    return c;
  }

  bool operator==(const SymmetrySplit& o) const { return m == o.m && k == o.k; }
};

// surface area of the unit sphere S^{n-1} in R^n
inline double sphere_area(int n) { return 2.0 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0); }

// volume of the unit ball in R^d
inline double ball_volume(int d) { return sphere_area(d) / d; }

// Product-of-spheres factor for section integrals.  With k = 1 the second
// factor is a signed coordinate and the profile occupies the sigma > 0 side
// only, so S^0 contributes one point instead of two.
inline double section_area_constant(const SymmetrySplit& s) {
  const double cm = sphere_area(s.m);            // = 2 for m = 1, both signs belong to the set
  const double ck = (s.k == 1) ? 1.0 : sphere_area(s.k);
  return cm * ck;
}

inline void validate_split(int d, const SymmetrySplit& s) {
  if (d < 3 || d > 32) fail(ErrorKind::InvalidConfig, "dimension must be in [3, 32]");
  if (s.m < 1 || s.k < 1 || s.m + s.k != d)
    fail(ErrorKind::InvalidConfig, "split (m,k) must satisfy m,k >= 1 and m + k = d");
}

}  // namespace aclab
