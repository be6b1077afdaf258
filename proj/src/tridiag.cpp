#include "aclab/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aclab::detail {

namespace {

// number of eigenvalues strictly below x (Sturm count via LDL^T)
int count_below(const std::vector<double>& diag, const std::vector<double>& off, double x) {
  const size_t n = diag.size();
  int count = 0;
  double q = diag[0] - x;
  if (q < 0) ++count;
  for (size_t i = 1; i < n; ++i) {
    double denom = q;
    if (denom == 0.0) denom = std::numeric_limits<double>::min();
    q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
    if (q < 0) ++count;
  }
  return count;
}

// solve (T - shift I) x = b in place; tridiagonal LU with row pivoting
void shifted_solve(const std::vector<double>& diag, const std::vector<double>& off, double shift,
                   std::vector<double>& x) {
  const size_t n = diag.size();
  std::vector<double> dl(n, 0.0), dm(n, 0.0), du(n, 0.0), du2(n, 0.0);
  std::vector<int> piv(n, 0);
  for (size_t i = 0; i < n; ++i) dm[i] = diag[i] - shift;
  for (size_t i = 0; i + 1 < n; ++i) {
    dl[i] = off[i];
    du[i] = off[i];
  }
  const double tiny = std::numeric_limits<double>::min() * 1e4;
  for (size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(dm[i]) >= std::abs(dl[i])) {
      if (dm[i] == 0.0) dm[i] = tiny;
      double f = dl[i] / dm[i];
      dm[i + 1] -= f * du[i];
      x[i + 1] -= f * x[i];
      piv[i] = 0;
      du2[i] = 0.0;
    } else {
      double f = dm[i] / dl[i];
      dm[i] = dl[i];
      double tmp = dm[i + 1];
      dm[i + 1] = du[i] - f * tmp;
      du2[i] = (i + 2 < n) ? du[i + 1] : 0.0;
      du[i] = tmp;
      if (i + 2 < n) du[i + 1] = -f * du2[i];
      std::swap(x[i], x[i + 1]);
      x[i + 1] -= f * x[i];
      piv[i] = 1;
    }
  }
  if (dm[n - 1] == 0.0) dm[n - 1] = tiny;
  x[n - 1] /= dm[n - 1];
  if (n >= 2) {
    size_t i = n - 2;
    while (true) {
      double v = x[i] - du[i] * x[i + 1] - (i + 2 < n ? du2[i] * x[i + 2] : 0.0);
      x[i] = v / dm[i];
      if (i == 0) break;
      --i;
    }
  }
}

}  // namespace

TridiagEigen smallest_eigenpair(const std::vector<double>& diag, const std::vector<double>& off) {
  const size_t n = diag.size();
  TridiagEigen out;
  if (n == 1) {
    out.value = diag[0];
    out.vector.assign(1, 1.0);
    return out;
  }

  // Gershgorin bounds
  double lo = diag[0], hi = diag[0];
  for (size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * scale; ++it) {
    double mid = 0.5 * (lo + hi);
    if (count_below(diag, off, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  out.value = 0.5 * (lo + hi);

  // inverse iteration; a mild shift below the eigenvalue keeps the solve stable
  double shift = out.value - 1e3 * std::numeric_limits<double>::epsilon() * scale;
  out.vector.assign(n, 1.0);
  for (int it = 0; it < 4; ++it) {
    shifted_solve(diag, off, shift, out.vector);
    double nrm = 0.0;
    for (double v : out.vector) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : out.vector) v /= nrm;
  }
  return out;
}

}  // namespace aclab::detail
