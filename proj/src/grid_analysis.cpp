#include "aclab/grid_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace aclab {

namespace {

struct EdgePoint {
  double x, y;
};

// linear interpolation of the zero of v along a cell edge
EdgePoint edge_zero(double x1, double y1, double v1, double x2, double y2, double v2) {
  double t = v1 / (v1 - v2);
  return {x1 + t * (x2 - x1), y1 + t * (y2 - y1)};
}

}  // namespace

FreeBoundaryCurve free_boundary(const GridField& f, const FreeBoundaryOptions& opts) {
  const GridGeometry& g = f.geom;
  const double cut = f.theta_cut();
  FreeBoundaryCurve out;

  bool any_pos = false, any_zero = false;
  for (std::size_t id = 0; id < f.u.size(); ++id) {
    if (f.cls[id] == NodeClass::outside) continue;
    (f.u[id] > cut ? any_pos : any_zero) = true;
  }
  if (!any_pos || !any_zero)
    fail(ErrorKind::EmptyBoundary, any_pos ? "field is positive everywhere" : "field vanishes");

  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      if (!f.active(i, j) || !f.active(i + 1, j) || !f.active(i, j + 1) ||
          !f.active(i + 1, j + 1))
        continue;
      double x = g.x_of(i), y = g.y_of(j), h = g.h;
      double v0 = f.u[f.idx(i, j)] - cut;          // (x, y)
      double v1 = f.u[f.idx(i + 1, j)] - cut;      // (x+h, y)
      double v2 = f.u[f.idx(i + 1, j + 1)] - cut;  // (x+h, y+h)
      double v3 = f.u[f.idx(i, j + 1)] - cut;      // (x, y+h)
      int mask = (v0 > 0 ? 1 : 0) | (v1 > 0 ? 2 : 0) | (v2 > 0 ? 4 : 0) | (v3 > 0 ? 8 : 0);
      if (mask == 0 || mask == 15) continue;
      EdgePoint bottom{}, right{}, top{}, left{};
      bool hb = (v0 > 0) != (v1 > 0), hr = (v1 > 0) != (v2 > 0);
      bool ht = (v3 > 0) != (v2 > 0), hl = (v0 > 0) != (v3 > 0);
      if (hb) bottom = edge_zero(x, y, v0, x + h, y, v1);
      if (hr) right = edge_zero(x + h, y, v1, x + h, y + h, v2);
      if (ht) top = edge_zero(x, y + h, v3, x + h, y + h, v2);
      if (hl) left = edge_zero(x, y, v0, x, y + h, v3);
      auto emit = [&](const EdgePoint& a, const EdgePoint& b) {
        out.segments.push_back({a.x, a.y, b.x, b.y});
      };
      switch (mask) {
        case 1: case 14: emit(left, bottom); break;
        case 2: case 13: emit(bottom, right); break;
        case 3: case 12: emit(left, right); break;
        case 4: case 11: emit(right, top); break;
        case 6: case 9:  emit(bottom, top); break;
        case 7: case 8:  emit(top, left); break;
        case 5: case 10: {
          double center = 0.25 * (v0 + v1 + v2 + v3);
          bool diag = (mask == 5) == (center > 0);
          if (diag) {
            emit(left, top);
            emit(right, bottom);
          } else {
            emit(left, bottom);
            emit(right, top);
          }
          break;
        }
        default: break;
      }
    }
  if (out.segments.empty()) fail(ErrorKind::EmptyBoundary, "no level crossings found");

  // deduplicated vertices (quantized to h/1024)
  std::map<std::pair<long long, long long>, std::size_t> seen;
  const double q = g.h / 1024.0;
  auto add_vertex = [&](double x, double y) {
    std::pair<long long, long long> key{std::llround(x / q), std::llround(y / q)};
    if (seen.emplace(key, out.vertices.size()).second) out.vertices.push_back({x, y});
  };
  for (const auto& s : out.segments) {
    add_vertex(s[0], s[1]);
    add_vertex(s[2], s[3]);
  }

  if (opts.compute_deficit) {
    const double r = opts.fit_radius_cells * g.h;
    out.deficit.resize(out.vertices.size());
    std::vector<std::pair<double, double>> pts;  // (value, reused per vertex)
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
      double vx = out.vertices[v][0], vy = out.vertices[v][1];
      int i0 = std::max(0, static_cast<int>((vx - r - g.x0) / g.h));
      int i1 = std::min(g.nx - 1, static_cast<int>((vx + r - g.x0) / g.h) + 1);
      int j0 = std::max(0, static_cast<int>((vy - r - g.y0) / g.h));
      int j1 = std::min(g.ny - 1, static_cast<int>((vy + r - g.y0) / g.h) + 1);
      std::vector<std::array<double, 3>> local;  // dx, dy, u
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
          if (!f.active(i, j)) continue;
          double dx = g.x_of(i) - vx, dy = g.y_of(j) - vy;
          if (dx * dx + dy * dy <= r * r) local.push_back({dx, dy, f.u[f.idx(i, j)]});
        }
      auto sup_err = [&](double ang, double c) {
        double ex = std::cos(ang), ey = std::sin(ang), worst = 0.0;
        for (const auto& p : local) {
          double plane = std::max(ex * p[0] + ey * p[1] - c, 0.0);
          worst = std::max(worst, std::abs(p[2] - plane));
        }
        return worst;
      };
      double best = std::numeric_limits<double>::infinity();
      double best_ang = 0.0, best_c = 0.0;
      for (int a = 0; a < 48; ++a) {
        double ang = 2 * M_PI * a / 48;
        for (int ci = -8; ci <= 8; ++ci) {
          double c = ci * r / 16.0;
          double e = sup_err(ang, c);
          if (e < best) {
            best = e;
            best_ang = ang;
            best_c = c;
          }
        }
      }
      for (int a = -6; a <= 6; ++a)
        for (int ci = -6; ci <= 6; ++ci) {
          double e = sup_err(best_ang + a * (2 * M_PI / 48) / 6.0, best_c + ci * (r / 16.0) / 6.0);
          best = std::min(best, e);
        }
      out.deficit[v] = best / r;
      (void)pts;
    }
  }
  return out;
}

namespace {

// centered-difference gradient at a node (one-sided against missing neighbors)
void node_gradient(const GridField& f, int i, int j, double& gx, double& gy) {
  const GridGeometry& g = f.geom;
  auto uval = [&](int a, int b) { return f.u[f.idx(a, b)]; };
  bool e = f.active(i + 1, j), w = f.active(i - 1, j);
  bool n = f.active(i, j + 1), s = f.active(i, j - 1);
  double h = g.h;
  if (e && w)
    gx = (uval(i + 1, j) - uval(i - 1, j)) / (2 * h);
  else if (e)
    gx = (uval(i + 1, j) - uval(i, j)) / h;
  else if (w)
    gx = (uval(i, j) - uval(i - 1, j)) / h;
  else
    gx = 0.0;
  if (n && s)
    gy = (uval(i, j + 1) - uval(i, j - 1)) / (2 * h);
  else if (n)
    gy = (uval(i, j + 1) - uval(i, j)) / h;
  else if (s)
    gy = (uval(i, j) - uval(i, j - 1)) / h;
  else
    gy = 0.0;
}

double bilinear_grad_sq(const GridField& f, double x, double y) {
  const GridGeometry& g = f.geom;
  double fx = (x - g.x0) / g.h, fy = (y - g.y0) / g.h;
  int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx - 2);
  int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny - 2);
  double tx = std::clamp(fx - i, 0.0, 1.0), ty = std::clamp(fy - j, 0.0, 1.0);
  double gx = 0, gy = 0, ax = 0, ay = 0;
  double wsum = 0;
  for (int b = 0; b <= 1; ++b)
    for (int a = 0; a <= 1; ++a) {
      if (!f.active(i + a, j + b)) continue;
      double w = (a ? tx : 1 - tx) * (b ? ty : 1 - ty);
      node_gradient(f, i + a, j + b, ax, ay);
      gx += w * ax;
      gy += w * ay;
      wsum += w;
    }
  if (wsum > 0) {
    gx /= wsum;
    gy /= wsum;
  }
  return gx * gx + gy * gy;
}

double dist_to_outer_boundary(const GridGeometry& g, double px, double py) {
  switch (g.shape) {
    case DomainShape::disk:
    case DomainShape::quarter_disk:
      return g.R - std::hypot(px, py);
    case DomainShape::rectangle:
      return std::min(std::min(g.R - std::abs(px), g.R - std::abs(py)),
                      std::min(g.R + px, g.R + py));
  }
  return 0.0;
}

}  // namespace

WeissSeries weiss_series(const GridField& f, double px, double py,
                         const std::vector<double>& radii) {
  const GridGeometry& g = f.geom;
  const bool quarter = g.shape == DomainShape::quarter_disk;
  const double Cw = g.measure_constant();
  const int drep = g.rep_dim();
  const double cut = f.theta_cut();
  const double h = g.h;

  WeissSeries out;
  out.px = px;
  out.py = py;
  out.radii = radii;
  for (double r : radii) {
    if (!(r > 2 * h)) fail(ErrorKind::RadiusOutOfDomain, "radius below grid resolution");
    if (dist_to_outer_boundary(g, px, py) - r < 2 * h)
      fail(ErrorKind::RadiusOutOfDomain, "ball of radius " + std::to_string(r) +
                                             " does not fit inside the domain");
    auto ring = [&](double s, bool boundary) {
      // midpoint quadrature over the in-domain part of the circle of radius s
      int msamp = std::max(quarter ? 8 : 16, static_cast<int>(std::ceil(
                                                 (quarter ? M_PI / 2 : 2 * M_PI) * s / (h / 2))));
      double dphi = (quarter ? M_PI / 2 : 2 * M_PI) / msamp;
      double acc = 0.0;
      for (int q = 0; q < msamp; ++q) {
        double phi = (q + 0.5) * dphi;
        double x = px + s * std::cos(phi), y = py + s * std::sin(phi);
        if (quarter && (x < 0 || y < 0)) continue;
        double kappa = Cw * (g.mode == GridMode::double_polar
                                 ? std::pow(x, g.split.m - 1) * std::pow(y, g.split.k - 1)
                                 : 1.0);
        double val;
        if (boundary) {
          double uu = f.u_at(x, y);
          val = uu * uu;
        } else {
          double chi = f.u_at(x, y) > cut ? 1.0 : 0.0;
          val = bilinear_grad_sq(f, x, y) + chi;
        }
        acc += val * kappa;
      }
      return acc * s * dphi;
    };

    double bulk = 0.0;
    int L = static_cast<int>(std::floor(r / h));
    for (int l = 0; l < L; ++l) bulk += ring((l + 0.5) * h, false) * h;
    if (r - L * h > 1e-12 * h) bulk += ring(0.5 * (L * h + r), false) * (r - L * h);
    double bdry = ring(r, true);
    out.values.push_back(bulk / std::pow(r, drep) - bdry / std::pow(r, drep + 1));
  }
  return out;
}

namespace {

// Frobenius norm of the finite-difference Hessian at a positive node;
// one-sided stencils toward the positive side near the free boundary
double hessian_norm(const GridField& f, int i, int j) {
  const double h2 = f.geom.h * f.geom.h;
  auto pos = [&](int a, int b) { return f.active(a, b) && f.u[f.idx(a, b)] > 0.0; };
  auto uval = [&](int a, int b) { return f.u[f.idx(a, b)]; };
  double uc = uval(i, j);

  auto second = [&](int di, int dj) -> double {
    if (pos(i + di, j + dj) && pos(i - di, j - dj))
      return (uval(i + di, j + dj) - 2 * uc + uval(i - di, j - dj)) / h2;
    if (pos(i + di, j + dj) && pos(i + 2 * di, j + 2 * dj))
      return (uc - 2 * uval(i + di, j + dj) + uval(i + 2 * di, j + 2 * dj)) / h2;
    if (pos(i - di, j - dj) && pos(i - 2 * di, j - 2 * dj))
      return (uc - 2 * uval(i - di, j - dj) + uval(i - 2 * di, j - 2 * dj)) / h2;
    return 0.0;
  };
  double uxx = second(1, 0);
  double uyy = second(0, 1);

  double uxy = 0.0;
  if (pos(i + 1, j + 1) && pos(i - 1, j - 1) && pos(i + 1, j - 1) && pos(i - 1, j + 1)) {
    uxy = (uval(i + 1, j + 1) + uval(i - 1, j - 1) - uval(i + 1, j - 1) - uval(i - 1, j + 1)) /
          (4 * h2);
  } else {
    for (auto [sx, sy] : {std::pair{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
      if (pos(i + sx, j) && pos(i, j + sy) && pos(i + sx, j + sy)) {
        uxy = sx * sy * (uval(i + sx, j + sy) - uval(i + sx, j) - uval(i, j + sy) + uc) / h2;
        break;
      }
    }
  }
  return std::sqrt(uxx * uxx + uyy * uyy + 2 * uxy * uxy);
}

}  // namespace

double regularity_scale(const GridField& f, double px, double py) {
  const GridGeometry& g = f.geom;
  const double h = g.h;
  double rmax = dist_to_outer_boundary(g, px, py);
  if (rmax < 2 * h) return 0.0;

  auto ok = [&](double r) {
    int i0 = std::max(0, static_cast<int>((px - r - g.x0) / h));
    int i1 = std::min(g.nx - 1, static_cast<int>((px + r - g.x0) / h) + 1);
    int j0 = std::max(0, static_cast<int>((py - r - g.y0) / h));
    int j1 = std::min(g.ny - 1, static_cast<int>((py + r - g.y0) / h) + 1);
    double bound = 1.0 / r;
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        if (!f.active(i, j) || !(f.u[f.idx(i, j)] > 0.0)) continue;
        double dx = g.x_of(i) - px, dy = g.y_of(j) - py;
        if (dx * dx + dy * dy > r * r) continue;
        if (hessian_norm(f, i, j) >= bound) return false;
      }
    return true;
  };

  double lo = 2 * h;
  if (!ok(lo)) return 0.0;
  double hi = rmax;
  if (ok(hi)) return hi;
  while (hi - lo > h / 4) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

PointClass classify_point(const GridField& f, double px, double py, const ClassifyOptions& opts) {
  const GridGeometry& g = f.geom;
  const double cut = f.theta_cut();
  const double rmin = opts.rmin_cells * g.h;

  int i = static_cast<int>(std::lround((px - g.x0) / g.h));
  int j = static_cast<int>(std::lround((py - g.y0) / g.h));
  // sign of u near p over the 5-point stencil
  bool all_pos = true, all_zero = true;
  for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
    int a = i + di, b = j + dj;
    if (g.shape == DomainShape::quarter_disk) {
      a = std::abs(a);
      b = std::abs(b);
    }
    if (!f.active(a, b)) continue;
    (f.u[f.idx(a, b)] > cut ? all_zero : all_pos) = false;
  }
  if (all_pos) return PointClass::interior;
  if (all_zero) return PointClass::contact;

  if (dist_to_outer_boundary(g, px, py) <= rmin + 2 * g.h)
    fail(ErrorKind::TooCoarse, "smallest reliable Weiss radius exceeds the distance to the boundary");
  double w = weiss_series(f, px, py, {rmin}).values[0];
  double half = ball_volume(g.rep_dim()) / 2.0;
  return (w > half + opts.density_gap) ? PointClass::singular : PointClass::regular;
}

double point_segment_distance(double px, double py, const std::array<double, 4>& s) {
  double ax = s[0], ay = s[1], bx = s[2], by = s[3];
  double vx = bx - ax, vy = by - ay;
  double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? std::clamp(((px - ax) * vx + (py - ay) * vy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
}

double point_curve_distance(double px, double py, const FreeBoundaryCurve& c) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : c.segments) best = std::min(best, point_segment_distance(px, py, s));
  return best;
}

double curve_distance(const FreeBoundaryCurve& a, const FreeBoundaryCurve& b) {
  // min distance between segment sets; endpoint sampling is enough here since
  // adjacent segments share endpoints at the cell scale
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : a.segments) {
    best = std::min(best, point_curve_distance(s[0], s[1], b));
    best = std::min(best, point_curve_distance(s[2], s[3], b));
  }
  for (const auto& s : b.segments) {
    best = std::min(best, point_curve_distance(s[0], s[1], a));
    best = std::min(best, point_curve_distance(s[2], s[3], a));
  }
  return best;
}

double hausdorff_to_segment(const FreeBoundaryCurve& c, const std::array<double, 4>& seg,
                            double sample_step) {
  double worst = 0.0;
  for (const auto& s : c.segments) {
    worst = std::max(worst, point_segment_distance(s[0], s[1], seg));
    worst = std::max(worst, point_segment_distance(s[2], s[3], seg));
  }
  double ax = seg[0], ay = seg[1], bx = seg[2], by = seg[3];
  double len = std::hypot(bx - ax, by - ay);
  int n = std::max(2, static_cast<int>(std::ceil(len / sample_step)));
  for (int q = 0; q <= n; ++q) {
    double t = static_cast<double>(q) / n;
    worst = std::max(worst, point_curve_distance(ax + t * (bx - ax), ay + t * (by - ay), c));
  }
  return worst;
}

}  // namespace aclab
