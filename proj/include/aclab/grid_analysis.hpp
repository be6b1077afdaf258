#pragma once

#include <array>
#include <limits>
#include <vector>

#include "aclab/grid.hpp"

namespace aclab {

struct FreeBoundaryCurve {
  std::vector<std::array<double, 4>> segments;  // x1, y1, x2, y2
  std::vector<std::array<double, 2>> vertices;  // deduplicated endpoints
  std::vector<double> deficit;                  // per vertex; empty unless requested
};

struct FreeBoundaryOptions {
  bool compute_deficit = false;
  int fit_radius_cells = 8;  // half-plane fits on B_{8h}
};

// Marching-squares contour of {u > theta_cut}, theta_cut = h^2.  Flatness
// deficit per vertex: min over half-plane fits p = (e.(x-v) - c)_+ of
// (1/r) sup_{B_r(v)} |u - p| at r = 8h.
FreeBoundaryCurve free_boundary(const GridField& f, const FreeBoundaryOptions& opts = {});

struct WeissSeries {
  double px = 0.0, py = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
};

// W(u;p,r) = r^{-d} ∫_{B_r(p)} (|grad u|^2 + 1_{u>0}) dmu - r^{-(d+1)} ∫_{∂B_r(p)} u^2 dsig,
// d the represented dimension, measures weighted in double_polar mode.
// Midpoint quadrature on rings, gradients by centered differences.
WeissSeries weiss_series(const GridField& f, double px, double py,
                         const std::vector<double>& radii);

// sup of r such that B_r(p) stays in the domain and |D^2 u| < 1/r on the
// positive nodes of B_r(p); centered-difference Hessians, one-sided within h
// of the free boundary; 0 when no admissible r >= 2h exists.
double regularity_scale(const GridField& f, double px, double py);

enum class PointClass { interior, contact, regular, singular };

struct ClassifyOptions {
  double density_gap = std::numeric_limits<double>::infinity();
  int rmin_cells = 16;  // smallest reliable Weiss radius in cells
};

PointClass classify_point(const GridField& f, double px, double py,
                          const ClassifyOptions& opts = {});

// polyline/segment distance helpers shared by the sweep harness
double point_segment_distance(double px, double py, const std::array<double, 4>& seg);
double point_curve_distance(double px, double py, const FreeBoundaryCurve& c);
double curve_distance(const FreeBoundaryCurve& a, const FreeBoundaryCurve& b);  // min distance
double hausdorff_to_segment(const FreeBoundaryCurve& c, const std::array<double, 4>& seg,
                            double sample_step);

}  // namespace aclab
