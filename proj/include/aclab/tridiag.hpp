#pragma once

#include <vector>

namespace aclab::detail {

// Smallest eigenpair of a symmetric tridiagonal matrix (diag, off), by Sturm
// sequence bisection for the value and inverse iteration for the vector.
struct TridiagEigen {
  double value = 0.0;
  std::vector<double> vector;
};

TridiagEigen smallest_eigenpair(const std::vector<double>& diag, const std::vector<double>& off);

}  // namespace aclab::detail
