#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aclab/grid_analysis.hpp"

namespace aclab {

// Monotone family of boundary data g_t = (g + t)_+; satisfies
// g_t - g_s >= t - s on {g_s > 0} for s < t by construction.
struct FamilySpec {
  GridGeometry geometry;
  std::function<double(double, double)> base_trace;
  std::vector<double> t_grid;  // strictly increasing, within (-1, 1)
  MinimizeOptions solver;
  ClassifyOptions classify;    // density gap for the singular-origin flag
  bool parallel = true;
};

struct TEntry {
  double t = 0.0;
  bool solved = false;
  bool converged = false;
  std::string error;  // per-t failure without aborting the sweep
  double energy = 0.0;
  bool singular_origin = false;
  double dist_origin_fb = 0.0;
  GridField field;
  FreeBoundaryCurve fb;
};

struct PairEntry {
  double s = 0.0, t = 0.0;
  double dist_fb = 0.0;       // min distance between the free boundaries
  double dist_sing_fb = 0.0;  // dist(Sing(u_s), Gamma(u_t)); NaN without a singular flag
};

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms residual of the log-log fit
  int pairs = 0;
};

struct SweepReport {
  std::vector<TEntry> entries;
  std::vector<PairEntry> pairs;
  bool ordering_ok = false;
};

// Solve each t (parallel), audit ordering, fill the pair table.
// Per-t solver failures are recorded on the entry; audit failures throw.
SweepReport run_family(const FamilySpec& spec);

struct OrderingAudit {
  double max_violation = 0.0;   // max over nodes of (u_s - u_t)_+ across ordered pairs
  double min_fb_gap = 0.0;      // min free-boundary separation across ordered pairs
  int pairs_checked = 0;
};

// Nodewise ordering up to C h and disjoint free boundaries with gap > h;
// throws OrderingViolation naming the offending pair and node.
OrderingAudit check_ordering(const std::vector<const GridField*>& fields,
                             const std::vector<const FreeBoundaryCurve*>& curves,
                             const std::vector<double>& ts, double slack_c = 2.0);

// Log-log least squares: the linear fit uses dist(Gamma_s, Gamma_t) over all
// ordered pairs, the superlinear fit uses s(tau) = dist(singular point of the
// first entry, Gamma at t_0 + tau).
std::pair<ExponentFit, ExponentFit> fit_separation_exponents(const SweepReport& report);

struct AnnulusDiag {
  double r = 0.0, r_outer = 0.0;
  double harnack = 0.0;     // max/min of (v-u) over scale-filtered ring nodes
  double decay = 0.0;       // sup_{r_outer}(v-u) / sup_r(v-u), scale-filtered
  int nodes_inner = 0, nodes_outer = 0;
};

// Ring diagnostics of a difference of ordered fields around the origin,
// restricted to nodes with regularity_scale(u) > rho * r.
std::vector<AnnulusDiag> difference_diagnostics(const GridField& u, const GridField& v, double rho,
                                                const std::vector<std::pair<double, double>>& annuli);

ExponentFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace aclab
