#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "aclab/symmetry.hpp"

namespace aclab {

enum class GridMode { planar, double_polar };
enum class DomainShape { disk, quarter_disk, rectangle };

// 2-D computational lattice.  planar mode is a genuine d = 2 problem; in
// double_polar mode the axes are (rho, sigma) = (|x'|, |x''|) and all
// integrals carry the cell-centered weight rho^{m-1} sigma^{k-1}, so the grid
// represents an O(m) x O(k)-symmetric minimizer in dimension d = m + k.
struct GridGeometry {
  GridMode mode = GridMode::planar;
  DomainShape shape = DomainShape::disk;
  SymmetrySplit split{1, 1};
  double R = 1.0;
  double h = 1.0 / 128;

  int nx = 0, ny = 0;   // lattice node counts (set by finalize)
  double x0 = 0.0, y0 = 0.0;

  void finalize();
  int rep_dim() const { return mode == GridMode::planar ? 2 : split.d(); }
  double x_of(int i) const { return x0 + i * h; }
  double y_of(int j) const { return y0 + j * h; }
  bool inside(double x, double y) const;
  double measure_constant() const;  // product-of-spheres factor (1 in planar mode)
};

enum class NodeClass : std::uint8_t { outside = 0, interior = 1, dirichlet = 2 };

struct GridField {
  GridGeometry geom;
  std::vector<double> u;
  std::vector<NodeClass> cls;
  std::vector<double> boundary_trace;
  std::vector<double> ewx, ewy;  // edge weights (x-edge i,j -> i+1,j and y-edge)
  std::vector<double> vw;        // volume weights at cell centers
  double energy = 0.0;
  int sweeps = 0;
  bool converged = false;

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * geom.nx + i; }
  double theta_cut() const { return geom.h * geom.h; }
  bool active(int i, int j) const {
    return i >= 0 && j >= 0 && i < geom.nx && j < geom.ny && cls[idx(i, j)] != NodeClass::outside;
  }
  // bilinear interpolation of u (0 outside the lattice)
  double u_at(double x, double y) const;
};

struct MinimizeOptions {
  double energy_tol = 1e-13;  // relative energy decrement stop per outer pass
  int max_outer = 200;
  unsigned seed = 1234567;    // order of the final polish sweep
  double cg_tol = 1e-11;
};

// Set up lattice, classes and weights; u is zero, Dirichlet nodes take the
// (clamped nonnegative) trace.
GridField make_field(const GridGeometry& geom, const std::function<double(double, double)>& trace);

// Fill all nodes of an analytic field (no minimization); for synthetic tests
// and evaluation of closed-form competitors.
GridField field_from_function(const GridGeometry& geom,
                              const std::function<double(double, double)>& f);

// Minimize the discrete energy  sum_edges w_e (u_i - u_j)^2 + sum_i w_i h^2 1_{u_i > 0}
// by nodewise exact relaxation (a node takes the weighted neighbor mean when
// that lowers the local energy against switching to zero, ties toward zero),
// ordered sweeps, harmonic re-solve on the frozen support between blocks, and
// a seeded randomized polish sweep.  Energy is non-increasing; exceeding the
// sweep budget returns the best iterate with converged = false.
GridField minimize(const GridGeometry& geom, const std::function<double(double, double)>& trace,
                   const MinimizeOptions& opts = {});

double grid_energy(const GridField& f);

// max over strictly positive interior nodes of 4 |mu_i - u_i| / h^2, the
// weighted 5-point Laplacian residual
double laplacian_residual_max(const GridField& f);

}  // namespace aclab
