#include "aclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace aclab {

void GridGeometry::finalize() {
  if (!(h > 0) || !(R > 0)) fail(ErrorKind::InvalidConfig, "grid requires h > 0 and R > 0");
  double cells = R / h;
  if (std::abs(cells - std::round(cells)) > 1e-9)
    fail(ErrorKind::InvalidConfig, "R must be an integer multiple of h");
  int n = static_cast<int>(std::lround(cells));
  if (mode == GridMode::double_polar) {
    validate_split(split.d(), split);
    if (shape == DomainShape::disk) shape = DomainShape::quarter_disk;
  }
  if (shape == DomainShape::quarter_disk) {
    nx = ny = n + 1;
    x0 = y0 = 0.0;
  } else {
    nx = ny = 2 * n + 1;
    x0 = y0 = -R;
  }
}

bool GridGeometry::inside(double x, double y) const {
  const double pad = 1e-12 * R;
  switch (shape) {
    case DomainShape::disk:
      return x * x + y * y <= R * R + pad;
    case DomainShape::quarter_disk:
      return x >= -pad && y >= -pad && x * x + y * y <= R * R + pad;
    case DomainShape::rectangle:
      return std::abs(x) <= R + pad && std::abs(y) <= R + pad;
  }
  return false;
}

double GridGeometry::measure_constant() const {
  return mode == GridMode::planar ? 1.0 : section_area_constant(split);
}

double GridField::u_at(double x, double y) const {
  double fx = (x - geom.x0) / geom.h;
  double fy = (y - geom.y0) / geom.h;
  int i = std::clamp(static_cast<int>(std::floor(fx)), 0, geom.nx - 2);
  int j = std::clamp(static_cast<int>(std::floor(fy)), 0, geom.ny - 2);
  double tx = std::clamp(fx - i, 0.0, 1.0);
  double ty = std::clamp(fy - j, 0.0, 1.0);
  auto val = [&](int a, int b) { return active(a, b) ? u[idx(a, b)] : 0.0; };
  return (1 - tx) * (1 - ty) * val(i, j) + tx * (1 - ty) * val(i + 1, j) +
         (1 - tx) * ty * val(i, j + 1) + tx * ty * val(i + 1, j + 1);
}

namespace {

double polar_weight(const GridGeometry& g, double x, double y) {
  if (g.mode == GridMode::planar) return 1.0;
  return std::pow(x, g.split.m - 1) * std::pow(y, g.split.k - 1);
}

void build_lattice(GridField& f) {
  const GridGeometry& g = f.geom;
  const std::size_t total = static_cast<std::size_t>(g.nx) * g.ny;
  f.u.assign(total, 0.0);
  f.boundary_trace.assign(total, 0.0);
  f.cls.assign(total, NodeClass::outside);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.inside(g.x_of(i), g.y_of(j))) f.cls[f.idx(i, j)] = NodeClass::interior;

  const bool quarter = g.shape == DomainShape::quarter_disk;
  auto missing = [&](int i, int j) {
    // neighbors across the symmetry axes of the quarter plane do not exist
    // but do not make a node a boundary node
    if (quarter && (i < 0 || j < 0)) return false;
    if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) return true;
    return f.cls[f.idx(i, j)] == NodeClass::outside;
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (f.cls[f.idx(i, j)] == NodeClass::outside) continue;
      if (missing(i - 1, j) || missing(i + 1, j) || missing(i, j - 1) || missing(i, j + 1))
        f.cls[f.idx(i, j)] = NodeClass::dirichlet;
    }

  // edge and cell weights; cells touching the quarter-plane axes are clipped
  // and use their own centers, so no singular integrand is ever evaluated
  const double h = g.h;
  f.ewx.assign(total, 0.0);
  f.ewy.assign(total, 0.0);
  f.vw.assign(total, 0.0);
  auto clip = [&](double c, bool axis_clipped) {
    return axis_clipped ? std::pair<double, double>{h / 4, 0.5}
                        : std::pair<double, double>{c, 1.0};
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t id = f.idx(i, j);
      if (f.cls[id] == NodeClass::outside) continue;
      double x = g.x_of(i), y = g.y_of(j);
      if (i + 1 < g.nx && f.cls[f.idx(i + 1, j)] != NodeClass::outside) {
        auto [yc, t] = clip(y, quarter && j == 0);
        f.ewx[id] = polar_weight(g, x + h / 2, yc) * t;
      }
      if (j + 1 < g.ny && f.cls[f.idx(i, j + 1)] != NodeClass::outside) {
        auto [xc, t] = clip(x, quarter && i == 0);
        f.ewy[id] = polar_weight(g, xc, y + h / 2) * t;
      }
      auto [xc, tx] = clip(x, quarter && i == 0);
      auto [yc, ty] = clip(y, quarter && j == 0);
      f.vw[id] = polar_weight(g, xc, yc) * tx * ty;
    }
}

struct Stencil {
  const GridField& f;
  int nx;
  explicit Stencil(const GridField& field) : f(field), nx(field.geom.nx) {}

  // sum of w_e * u_nb and sum of w_e over existing edges of node id
  inline void gather(int i, int j, double& wsum, double& wusum) const {
    std::size_t id = f.idx(i, j);
    wsum = 0.0;
    wusum = 0.0;
    if (i + 1 < f.geom.nx && f.cls[id + 1] != NodeClass::outside) {
      wsum += f.ewx[id];
      wusum += f.ewx[id] * f.u[id + 1];
    }
    if (i > 0 && f.cls[id - 1] != NodeClass::outside) {
      wsum += f.ewx[id - 1];
      wusum += f.ewx[id - 1] * f.u[id - 1];
    }
    if (j + 1 < f.geom.ny && f.cls[id + nx] != NodeClass::outside) {
      wsum += f.ewy[id];
      wusum += f.ewy[id] * f.u[id + nx];
    }
    if (j > 0 && f.cls[id - nx] != NodeClass::outside) {
      wsum += f.ewy[id - nx];
      wusum += f.ewy[id - nx] * f.u[id - nx];
    }
  }
};

// conjugate gradient for the weighted Laplacian over a node subset
// (mask = true where u is unknown); Dirichlet data enters through u itself
void cg_solve(GridField& f, const std::vector<char>& unknown, double tol) {
  const GridGeometry& g = f.geom;
  const std::size_t total = f.u.size();
  std::vector<double> r(total, 0.0), p(total, 0.0), ap(total, 0.0), dinv(total, 0.0);
  Stencil st(f);

  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        std::size_t id = f.idx(i, j);
        if (!unknown[id]) continue;
        double acc = 0.0, w = 0.0;
        if (i + 1 < g.nx && f.cls[id + 1] != NodeClass::outside) {
          w += f.ewx[id];
          if (unknown[id + 1]) acc -= f.ewx[id] * v[id + 1];
        }
        if (i > 0 && f.cls[id - 1] != NodeClass::outside) {
          w += f.ewx[id - 1];
          if (unknown[id - 1]) acc -= f.ewx[id - 1] * v[id - 1];
        }
        if (j + 1 < g.ny && f.cls[id + g.nx] != NodeClass::outside) {
          w += f.ewy[id];
          if (unknown[id + g.nx]) acc -= f.ewy[id] * v[id + g.nx];
        }
        if (j > 0 && f.cls[id - g.nx] != NodeClass::outside) {
          w += f.ewy[id - g.nx];
          if (unknown[id - g.nx]) acc -= f.ewy[id - g.nx] * v[id - g.nx];
        }
        out[id] = acc + w * v[id];
      }
  };

  // right-hand side: contributions of fixed neighbors; initial residual from u
  std::vector<double> x(total, 0.0), b(total, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t id = f.idx(i, j);
      if (!unknown[id]) continue;
      double wsum, wusum;
      st.gather(i, j, wsum, wusum);
      double fixed_part = 0.0;
      // weighted sum over fixed neighbors only
      auto add = [&](std::size_t nid, double w) {
        if (!unknown[nid]) fixed_part += w * f.u[nid];
      };
      if (i + 1 < g.nx && f.cls[id + 1] != NodeClass::outside) add(id + 1, f.ewx[id]);
      if (i > 0 && f.cls[id - 1] != NodeClass::outside) add(id - 1, f.ewx[id - 1]);
      if (j + 1 < g.ny && f.cls[id + g.nx] != NodeClass::outside) add(id + g.nx, f.ewy[id]);
      if (j > 0 && f.cls[id - g.nx] != NodeClass::outside) add(id - g.nx, f.ewy[id - g.nx]);
      b[id] = fixed_part;
      x[id] = f.u[id];
      dinv[id] = wsum > 0 ? 1.0 / wsum : 0.0;
      (void)wusum;
    }

  apply(x, ap);
  double bnorm = 0.0;
  for (std::size_t id = 0; id < total; ++id)
    if (unknown[id]) {
      r[id] = b[id] - ap[id];
      bnorm += b[id] * b[id];
    }
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) bnorm = 1.0;

  double rz = 0.0;
  for (std::size_t id = 0; id < total; ++id)
    if (unknown[id]) {
      p[id] = dinv[id] * r[id];
      rz += r[id] * p[id];
    }
  const int max_iter = 8 * std::max(g.nx, g.ny) + 200;
  for (int it = 0; it < max_iter; ++it) {
    double rnorm = 0.0;
    for (std::size_t id = 0; id < total; ++id)
      if (unknown[id]) rnorm += r[id] * r[id];
    if (std::sqrt(rnorm) <= tol * bnorm) break;
    apply(p, ap);
    double pap = 0.0;
    for (std::size_t id = 0; id < total; ++id)
      if (unknown[id]) pap += p[id] * ap[id];
    if (!(pap > 0)) break;
    double alpha = rz / pap;
    for (std::size_t id = 0; id < total; ++id)
      if (unknown[id]) {
        x[id] += alpha * p[id];
        r[id] -= alpha * ap[id];
      }
    double rz_new = 0.0;
    for (std::size_t id = 0; id < total; ++id)
      if (unknown[id]) rz_new += r[id] * dinv[id] * r[id];
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t id = 0; id < total; ++id)
      if (unknown[id]) p[id] = dinv[id] * r[id] + beta * p[id];
  }
  for (std::size_t id = 0; id < total; ++id)
    if (unknown[id]) f.u[id] = x[id];
}

}  // namespace

GridField make_field(const GridGeometry& geom_in,
                     const std::function<double(double, double)>& trace) {
  GridGeometry geom = geom_in;
  if (geom.nx == 0) geom.finalize();
  GridField f;
  f.geom = geom;
  build_lattice(f);
  for (int j = 0; j < geom.ny; ++j)
    for (int i = 0; i < geom.nx; ++i) {
      std::size_t id = f.idx(i, j);
      if (f.cls[id] == NodeClass::dirichlet) {
        double v = std::max(0.0, trace(geom.x_of(i), geom.y_of(j)));
        f.u[id] = v;
        f.boundary_trace[id] = v;
      }
    }
  return f;
}

GridField field_from_function(const GridGeometry& geom,
                              const std::function<double(double, double)>& fn) {
  GridField f = make_field(geom, fn);
  for (int j = 0; j < f.geom.ny; ++j)
    for (int i = 0; i < f.geom.nx; ++i) {
      std::size_t id = f.idx(i, j);
      if (f.cls[id] != NodeClass::outside) f.u[id] = std::max(0.0, fn(f.geom.x_of(i), f.geom.y_of(j)));
    }
  f.energy = grid_energy(f);
  f.converged = true;
  return f;
}

double grid_energy(const GridField& f) {
  const GridGeometry& g = f.geom;
  double e = 0.0;
  const double h2 = g.h * g.h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t id = f.idx(i, j);
      if (f.cls[id] == NodeClass::outside) continue;
      if (i + 1 < g.nx && f.cls[id + 1] != NodeClass::outside) {
        double d = f.u[id + 1] - f.u[id];
        e += f.ewx[id] * d * d;
      }
      if (j + 1 < g.ny && f.cls[id + g.nx] != NodeClass::outside) {
        double d = f.u[id + g.nx] - f.u[id];
        e += f.ewy[id] * d * d;
      }
      if (f.u[id] > 0.0) e += f.vw[id] * h2;
    }
  return e;
}

namespace {

// exact nodewise minimizer: weighted neighbor mean against switching off
int relax_sweep(GridField& f, const std::vector<std::size_t>& order, double* max_delta) {
  Stencil st(f);
  const double h2 = f.geom.h * f.geom.h;
  int flips = 0;
  double md = 0.0;
  const int nx = f.geom.nx;
  for (std::size_t id : order) {
    int i = static_cast<int>(id % nx);
    int j = static_cast<int>(id / nx);
    double wsum, wusum;
    st.gather(i, j, wsum, wusum);
    double unew = 0.0;
    if (wsum > 0.0) {
      double mu = wusum / wsum;
      if (mu > 0.0 && wsum * mu * mu > f.vw[id] * h2) unew = mu;
    }
    double old = f.u[id];
    if ((old > 0.0) != (unew > 0.0)) ++flips;
    md = std::max(md, std::abs(unew - old));
    f.u[id] = unew;
  }
  if (max_delta) *max_delta = md;
  return flips;
}

}  // namespace

GridField minimize(const GridGeometry& geom, const std::function<double(double, double)>& trace,
                   const MinimizeOptions& opts) {
  GridField f = make_field(geom, trace);
  const GridGeometry& g = f.geom;
  const std::size_t total = f.u.size();

  std::vector<std::size_t> lex, rev;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (f.cls[f.idx(i, j)] == NodeClass::interior) lex.push_back(f.idx(i, j));
  rev.assign(lex.rbegin(), lex.rend());

  // weighted-harmonic extension of the trace
  std::vector<char> unknown(total, 0);
  for (std::size_t id : lex) unknown[id] = 1;
  cg_solve(f, unknown, opts.cg_tol);
  for (std::size_t id : lex) f.u[id] = std::max(0.0, f.u[id]);

  auto cg_on_support = [&]() {
    std::vector<char> sup(total, 0);
    bool any = false;
    for (std::size_t id : lex)
      if (f.u[id] > 0.0) {
        sup[id] = 1;
        any = true;
      }
    if (any) cg_solve(f, sup, opts.cg_tol);
    for (std::size_t id : lex) f.u[id] = std::max(0.0, f.u[id]);
  };

  std::vector<std::size_t> shuffled = lex;
  std::mt19937 rng(opts.seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  double e_prev = grid_energy(f);
  const double slack = 1e-9;
  f.converged = false;

  auto check_energy = [&](const char* where) {
    double e_cur = grid_energy(f);
    if (e_cur > e_prev + slack * (1.0 + std::abs(e_prev)))
      throw std::logic_error(std::string("energy increased across ") + where);
    bool stalled = e_prev - e_cur <= opts.energy_tol * (1.0 + std::abs(e_cur));
    e_prev = e_cur;
    return stalled;
  };

  // Phase 1: pure ordered relaxation until the support freezes.  The zero set
  // only grows under single-node moves, and the lagged Gauss-Seidel values
  // keep the carving from overshooting the free boundary; solving the
  // harmonic part exactly before the support settles would deepen the carve.
  const long sweep_budget = 64L * std::max(g.nx, g.ny) + 512;
  bool stalled = false;
  int quiet = 0;
  while (f.sweeps < sweep_budget) {
    int flips = relax_sweep(f, lex, nullptr);
    flips += relax_sweep(f, rev, nullptr);
    f.sweeps += 2;
    quiet = (flips == 0) ? quiet + 1 : 0;
    bool flat = check_energy("a sweep pass");
    if (quiet >= 2) break;
    if (flat && flips == 0) break;
  }
  bool budget_ok = f.sweeps < sweep_budget;

  // Phase 2: exact harmonic values on the frozen support, re-verified by
  // threshold sweeps; ends with the seeded randomized polish sweep.
  bool stable = false;
  for (int round = 0; round < opts.max_outer && budget_ok; ++round) {
    cg_on_support();
    check_energy("a harmonic re-solve");
    int flips_v = relax_sweep(f, lex, nullptr);
    flips_v += relax_sweep(f, rev, nullptr);
    f.sweeps += 2;
    check_energy("a verification pass");
    if (flips_v == 0) {
      int flips_p = relax_sweep(f, shuffled, nullptr);
      f.sweeps += 1;
      check_energy("the polish sweep");
      if (flips_p == 0) {
        cg_on_support();
        check_energy("the final harmonic re-solve");
        stable = true;
        break;
      }
    }
  }
  f.converged = budget_ok && stable;
  (void)stalled;
  f.energy = e_prev;
  return f;
}

double laplacian_residual_max(const GridField& f) {
  Stencil st(f);
  const GridGeometry& g = f.geom;
  const double h2 = g.h * g.h;
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t id = f.idx(i, j);
      if (f.cls[id] != NodeClass::interior || !(f.u[id] > 0.0)) continue;
      double wsum, wusum;
      st.gather(i, j, wsum, wusum);
      if (wsum <= 0) continue;
      worst = std::max(worst, 4.0 * std::abs(wusum / wsum - f.u[id]) / h2);
    }
  return worst;
}

}  // namespace aclab
