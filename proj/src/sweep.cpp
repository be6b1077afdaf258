#include "aclab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

namespace aclab {

ExponentFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 4 || x.size() != y.size())
    fail(ErrorKind::InsufficientPairs, "need at least 4 pairs for a log-log fit");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  ExponentFit fit;
  fit.pairs = n;
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) fail(ErrorKind::InsufficientPairs, "degenerate abscissae");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    double e = std::log(y[i]) - (fit.slope * std::log(x[i]) + fit.intercept);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

OrderingAudit check_ordering(const std::vector<const GridField*>& fields,
                             const std::vector<const FreeBoundaryCurve*>& curves,
                             const std::vector<double>& ts, double slack_c) {
  if (fields.size() < 2) fail(ErrorKind::InvalidConfig, "need at least two fields");
  OrderingAudit audit;
  audit.min_fb_gap = std::numeric_limits<double>::infinity();
  const double h = fields[0]->geom.h;
  for (std::size_t a = 0; a + 1 < fields.size(); ++a)
    for (std::size_t b = a + 1; b < fields.size(); ++b) {
      const GridField& lo = *fields[a];
      const GridField& hi = *fields[b];
      for (std::size_t id = 0; id < lo.u.size(); ++id) {
        if (lo.cls[id] == NodeClass::outside) continue;
        double v = lo.u[id] - hi.u[id];
        audit.max_violation = std::max(audit.max_violation, v);
        if (v > slack_c * h) {
          int i = static_cast<int>(id % lo.geom.nx), j = static_cast<int>(id / lo.geom.nx);
          fail(ErrorKind::OrderingViolation,
               "pair (t=" + std::to_string(ts[a]) + ", t=" + std::to_string(ts[b]) +
                   ") violates ordering at node (" + std::to_string(i) + "," + std::to_string(j) +
                   ") by " + std::to_string(v));
        }
      }
      if (curves.size() == fields.size() && curves[a] && curves[b]) {
        double gap = curve_distance(*curves[a], *curves[b]);
        audit.min_fb_gap = std::min(audit.min_fb_gap, gap);
        if (!(gap > h))
          fail(ErrorKind::OrderingViolation,
               "free boundaries of pair (t=" + std::to_string(ts[a]) + ", t=" +
                   std::to_string(ts[b]) + ") are not separated (gap " + std::to_string(gap) + ")");
      }
      ++audit.pairs_checked;
    }
  return audit;
}

SweepReport run_family(const FamilySpec& spec) {
  const auto& ts = spec.t_grid;
  if (ts.size() < 2) fail(ErrorKind::InvalidConfig, "t grid needs at least two entries");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] <= -1.0 || ts[i] >= 1.0) fail(ErrorKind::InvalidConfig, "t must lie in (-1,1)");
    if (i && !(ts[i] > ts[i - 1])) fail(ErrorKind::InvalidConfig, "t grid must be increasing");
  }

  GridGeometry geom = spec.geometry;
  if (geom.nx == 0) geom.finalize();

  SweepReport report;
  report.entries.resize(ts.size());

  auto solve_one = [&](std::size_t i) {
    TEntry& e = report.entries[i];
    e.t = ts[i];
    auto trace = [&, t = ts[i]](double x, double y) {
      return std::max(spec.base_trace(x, y) + t, 0.0);
    };
    try {
      e.field = minimize(geom, trace, spec.solver);
      e.converged = e.field.converged;
      e.energy = e.field.energy;
      e.fb = free_boundary(e.field);
      e.solved = true;
      e.dist_origin_fb = point_curve_distance(0.0, 0.0, e.fb);
      if (geom.mode == GridMode::double_polar &&
          std::isfinite(spec.classify.density_gap)) {
        try {
          e.singular_origin =
              classify_point(e.field, 0.0, 0.0, spec.classify) == PointClass::singular;
        } catch (const Error&) {
          e.singular_origin = false;
        }
      }
    } catch (const Error& err) {
      e.error = err.what();
    }
  };

  if (spec.parallel) {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> futs;
    std::size_t next = 0;
    while (next < ts.size()) {
      futs.clear();
      for (unsigned w = 0; w < workers && next < ts.size(); ++w, ++next)
        futs.push_back(std::async(std::launch::async, solve_one, next));
      for (auto& fu : futs) fu.get();
    }
  } else {
    for (std::size_t i = 0; i < ts.size(); ++i) solve_one(i);
  }

  // ordering audit over the solved entries
  std::vector<const GridField*> fields;
  std::vector<const FreeBoundaryCurve*> curves;
  std::vector<double> solved_ts;
  for (const auto& e : report.entries)
    if (e.solved) {
      fields.push_back(&e.field);
      curves.push_back(&e.fb);
      solved_ts.push_back(e.t);
    }
  if (fields.size() >= 2) {
    check_ordering(fields, curves, solved_ts);
    report.ordering_ok = true;
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t a = 0; a + 1 < report.entries.size(); ++a)
    for (std::size_t b = a + 1; b < report.entries.size(); ++b) {
      const TEntry& es = report.entries[a];
      const TEntry& et = report.entries[b];
      if (!es.solved || !et.solved) continue;
      PairEntry pe;
      pe.s = es.t;
      pe.t = et.t;
      pe.dist_fb = curve_distance(es.fb, et.fb);
      pe.dist_sing_fb = es.singular_origin ? point_curve_distance(0.0, 0.0, et.fb) : nan;
      report.pairs.push_back(pe);
    }
  return report;
}

std::pair<ExponentFit, ExponentFit> fit_separation_exponents(const SweepReport& report) {
  const double h = report.entries.empty() ? 0.0 : report.entries.front().field.geom.h;
  std::vector<double> dx, dy;
  for (const auto& p : report.pairs)
    if (p.dist_fb > h) {
      dx.push_back(p.t - p.s);
      dy.push_back(p.dist_fb);
    }
  ExponentFit linear = fit_loglog(dx, dy);

  // superlinear: distances from the singular point of the first entry
  ExponentFit super;
  if (!report.entries.empty() && report.entries.front().singular_origin) {
    double t0 = report.entries.front().t;
    std::vector<double> tx, ty;
    for (const auto& p : report.pairs)
      if (p.s == t0 && std::isfinite(p.dist_sing_fb) && p.dist_sing_fb > h) {
        tx.push_back(p.t - t0);
        ty.push_back(p.dist_sing_fb);
      }
    super = fit_loglog(tx, ty);
  } else {
    fail(ErrorKind::InsufficientPairs, "no singular point flagged at the smallest t");
  }
  return {linear, super};
}

std::vector<AnnulusDiag> difference_diagnostics(
    const GridField& u, const GridField& v, double rho,
    const std::vector<std::pair<double, double>>& annuli) {
  if (u.u.size() != v.u.size()) fail(ErrorKind::InvalidConfig, "fields on different grids");
  const GridGeometry& g = u.geom;
  const double h = g.h;

  auto ring_stats = [&](double r, double& mx, double& mn, int& count) {
    mx = 0.0;
    mn = std::numeric_limits<double>::infinity();
    count = 0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        std::size_t id = u.idx(i, j);
        if (u.cls[id] == NodeClass::outside || !(u.u[id] > 0.0)) continue;
        double d = std::hypot(g.x_of(i), g.y_of(j));
        if (std::abs(d - r) > h / 2) continue;
        if (regularity_scale(u, g.x_of(i), g.y_of(j)) <= rho * r) continue;
        double diff = v.u[id] - u.u[id];
        mx = std::max(mx, diff);
        mn = std::min(mn, diff);
        ++count;
      }
  };

  std::vector<AnnulusDiag> out;
  for (auto [r, r2] : annuli) {
    AnnulusDiag d;
    d.r = r;
    d.r_outer = r2;
    double mx, mn, mx2, mn2;
    ring_stats(r, mx, mn, d.nodes_inner);
    ring_stats(r2, mx2, mn2, d.nodes_outer);
    if (d.nodes_inner == 0 || d.nodes_outer == 0)
      fail(ErrorKind::EmptyAnnulus, "no node on the annulus passes the scale filter");
    d.harnack = (mn > 0) ? mx / mn : std::numeric_limits<double>::infinity();
    d.decay = (mx > 0) ? mx2 / mx : std::numeric_limits<double>::infinity();
    out.push_back(d);
  }
  return out;
}

}  // namespace aclab
