#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aclab/io.hpp"

namespace fs = std::filesystem;
using namespace aclab;

namespace {

SymmetrySplit parse_split(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos)
    fail(ErrorKind::InvalidConfig, "split must be 'M,K', got '" + s + "'");
  return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

GridGeometry parse_geometry(const std::string& spec, const std::string& shape, double R, double h) {
  GridGeometry g;
  g.R = R;
  g.h = h;
  if (spec == "planar") {
    g.mode = GridMode::planar;
    if (shape == "disk")
      g.shape = DomainShape::disk;
    else if (shape == "rect" || shape == "rectangle")
      g.shape = DomainShape::rectangle;
    else
      fail(ErrorKind::InvalidConfig, "planar shape must be disk or rect, got '" + shape + "'");
  } else if (spec.rfind("dp:", 0) == 0) {
    g.mode = GridMode::double_polar;
    g.shape = DomainShape::quarter_disk;
    g.split = parse_split(spec.substr(3));
  } else {
    fail(ErrorKind::InvalidConfig, "geometry must be 'planar' or 'dp:M,K', got '" + spec + "'");
  }
  g.finalize();
  return g;
}

// boundary data specs: flat:c -> (x - c)_+, cone -> trace of the split's cone,
// file:PATH -> angle/value CSV on the outer arc, linearly interpolated
struct TraceSpec {
  std::function<double(double, double)> fn;
  ConeProfile profile;  // populated for 'cone'
  bool is_cone = false;
};

TraceSpec make_trace(const std::string& data, const GridGeometry& geom) {
  TraceSpec t;
  if (data.rfind("flat:", 0) == 0) {
    double c = std::stod(data.substr(5));
    t.fn = [c](double x, double) { return std::max(x - c, 0.0); };
  } else if (data == "cone") {
    if (geom.mode != GridMode::double_polar)
      fail(ErrorKind::InvalidConfig, "cone data requires a double-polar geometry");
    t.profile = shoot_profile(geom.split.d(), geom.split);
    t.is_cone = true;
    ConeProfile p = t.profile;
    t.fn = [p](double x, double y) { return p.evaluate(x, y); };
  } else if (data.rfind("file:", 0) == 0) {
    std::ifstream in(data.substr(5));
    if (!in) fail(ErrorKind::InvalidConfig, "cannot open trace file " + data.substr(5));
    std::vector<std::pair<double, double>> samples;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      double a, v;
      char comma;
      if (ls >> a >> comma >> v) samples.push_back({a, v});
    }
    if (samples.size() < 2) fail(ErrorKind::InvalidConfig, "trace file needs >= 2 samples");
    std::sort(samples.begin(), samples.end());
    t.fn = [samples](double x, double y) {
      double a = std::atan2(y, x);
      if (a <= samples.front().first) return samples.front().second;
      if (a >= samples.back().first) return samples.back().second;
      auto it = std::lower_bound(samples.begin(), samples.end(), std::make_pair(a, -1e300));
      auto prev = it - 1;
      double w = (a - prev->first) / (it->first - prev->first);
      return (1 - w) * prev->second + w * it->second;
    };
  } else {
    fail(ErrorKind::InvalidConfig, "data must be flat:c, cone, or file:PATH, got '" + data + "'");
  }
  return t;
}

std::vector<double> parse_t_grid(const std::string& spec, double h) {
  auto parts = [&] {
    std::vector<std::string> out;
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) out.push_back(item);
    return out;
  }();
  if (parts.size() != 4) fail(ErrorKind::InvalidConfig, "t grid must be log:a:b:n or lin:a:b:n");
  double a = std::stod(parts[1]), b = std::stod(parts[2]);
  int n = std::stoi(parts[3]);
  if (n < 2 || !(b > a)) fail(ErrorKind::InvalidConfig, "bad t grid range");
  std::vector<double> out;
  if (parts[0] == "log") {
    double floor_t = 10 * h * h;  // stay above solver noise
    a = std::max(a, floor_t);
    for (int i = 0; i < n; ++i) out.push_back(a * std::pow(b / a, double(i) / (n - 1)));
  } else if (parts[0] == "lin") {
    for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  } else {
    fail(ErrorKind::InvalidConfig, "t grid kind must be log or lin");
  }
  return out;
}

std::vector<std::pair<double, double>> parse_annuli(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos)
      fail(ErrorKind::InvalidConfig, "annuli must be r1:r2,r1:r2,...");
    out.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  if (out.empty()) fail(ErrorKind::InvalidConfig, "empty annuli list");
  return out;
}

fs::path out_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ACLAB_OUT")) return env;
  return ".";
}

void dump_config(const RunConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / "config.json", std::ios::binary);
  out << cfg.to_json() << "\n";
}

std::vector<GoldenRecord> table_records(const std::vector<TableRow>& rows) {
  std::vector<GoldenRecord> recs;
  for (const auto& r : rows) {
    if (!r.selected) continue;
    std::string d = std::to_string(r.d);
    recs.push_back({"lambda_" + d, r.lambda, "derived_oracle", 0.02});
    recs.push_back({"gamma_" + d, r.gamma, "derived_oracle", 5e-3});
    recs.push_back({"theta_fb_" + d, r.theta_fb, "derived_oracle", 1e-8});
    recs.push_back({"H_" + d, r.H, "derived_oracle", 1e-7});
    recs.push_back({"split_m_" + d, static_cast<double>(r.m), "derived_oracle", 0.0});
  }
  return recs;
}

int cmd_cone(int dim, const std::string& split, double tol, int samples, const std::string& out) {
  ConeProfile p = shoot_profile(dim, parse_split(split), tol, samples);
  fs::path dir = out_root(out);
  write_profile(dir, "profile_d" + std::to_string(dim) + "_" + std::to_string(p.split.m) + "_" +
                         std::to_string(p.split.k),
                p);
  std::cout << "d=" << dim << " split=(" << p.split.m << "," << p.split.k << ")"
            << " theta_fb=" << format_real(p.theta_fb) << " H=" << format_real(p.H)
            << " density=" << format_real(p.weiss_density)
            << " admissible=" << (p.admissible ? 1 : 0) << "\n";
  return 0;
}

int cmd_spectrum(int dim, const std::string& split, int n) {
  std::vector<SymmetrySplit> splits;
  if (!split.empty())
    splits.push_back(parse_split(split));
  else
    for (int m = 1; m < dim; ++m) splits.push_back({m, dim - m});
  std::cout << "d,m,k,theta_fb,H,lambda,gamma,certified\n";
  for (const auto& s : splits) {
    ConeProfile p;
    try {
      p = shoot_profile(dim, s);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoZeroCrossing) continue;
      throw;
    }
    EigenResult eig = principal_eigenvalue(p, n);
    std::cout << dim << "," << s.m << "," << s.k << "," << format_real(p.theta_fb) << ","
              << format_real(p.H) << "," << format_real(eig.lambda) << ","
              << format_real(eig.gamma_minus) << "," << format_real(eig.certified_error) << "\n";
  }
  return 0;
}

int cmd_table(const std::string& dims, int n, const std::string& golden, const std::string& out) {
  auto dots = dims.find("..");
  if (dots == std::string::npos) fail(ErrorKind::InvalidConfig, "dims must be 'a..b'");
  int d0 = std::stoi(dims.substr(0, dots)), d1 = std::stoi(dims.substr(dots + 2));
  std::vector<TableRow> rows = golden_table(d0, d1, n);
  fs::path dir = out_root(out);
  RunConfig cfg;
  cfg.command = "table";
  cfg.d_min = d0;
  cfg.d_max = d1;
  cfg.n = n;
  cfg.golden = golden;
  cfg.out_dir = dir.string();
  dump_config(cfg, dir);
  write_table_csv(dir / "table.csv", rows);
  std::vector<GoldenRecord> produced = table_records(rows);
  save_golden(dir / "table_golden.json", produced);
  for (const auto& r : rows)
    if (r.selected)
      std::cout << "d=" << r.d << " split=(" << r.m << "," << r.k << ")"
                << " lambda=" << format_real(r.lambda) << " gamma=" << format_real(r.gamma)
                << " |delta|=" << format_real(std::abs(r.table_delta)) << "\n";
  if (!golden.empty()) {
    RegressionReport rep = regression_check(fs::path(golden), dir / "table_golden.json");
    if (!rep.ok) {
      std::cerr << "golden regression failed:\n";
      for (const auto& f : rep.failures) std::cerr << "  " << f << "\n";
      return 1;
    }
    std::cout << "golden regression ok, max |dev| = " << format_real(rep.max_abs_dev) << "\n";
  }
  return 0;
}

int cmd_solve(const std::string& geometry, const std::string& shape, const std::string& data,
              double R, double h, unsigned seed, const std::string& out) {
  GridGeometry geom = parse_geometry(geometry, shape, R, h);
  TraceSpec trace = make_trace(data, geom);
  MinimizeOptions opts;
  opts.seed = seed;
  GridField field = minimize(geom, trace.fn, opts);
  fs::path dir = out_root(out);
  RunConfig cfg;
  cfg.command = "solve";
  cfg.geometry = geometry;
  cfg.shape = shape;
  cfg.data = data;
  cfg.radius = R;
  cfg.h = h;
  cfg.seed = seed;
  cfg.out_dir = dir.string();
  dump_config(cfg, dir);
  write_field(dir, "field", field);
  FreeBoundaryCurve fb;
  bool have_fb = true;
  try {
    fb = free_boundary(field);
    write_curve_csv(dir / "fb.csv", fb);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyBoundary) throw;
    have_fb = false;
    std::cout << "free boundary: empty (" << e.what() << ")\n";
  }
  // Weiss ladder at the origin (double-polar) or on the data's line (flat)
  double cx = 0.0, cy = 0.0;
  if (geom.mode == GridMode::planar && data.rfind("flat:", 0) == 0) cx = std::stod(data.substr(5));
  std::vector<double> radii;
  for (double r = 0.1 * R; r <= 0.45 * R + 1e-12; r += 0.05 * R)
    if (std::hypot(cx, cy) + r < R - 3 * h) radii.push_back(r);
  if (!radii.empty()) {
    WeissSeries ws = weiss_series(field, cx, cy, radii);
    write_series_csv(dir / "weiss.csv", ws);
  }
  std::cout << "energy=" << format_real(field.energy) << " sweeps=" << field.sweeps
            << " converged=" << (field.converged ? 1 : 0)
            << (have_fb ? " fb_segments=" + std::to_string(fb.segments.size()) : "") << "\n";
  return field.converged ? 0 : 1;
}

void write_sweep_report(const fs::path& dir, const SweepReport& report) {
  nlohmann::json j;
  j["ordering_ok"] = report.ordering_ok;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : report.entries) {
    nlohmann::json je;
    je["t"] = e.t;
    je["solved"] = e.solved;
    je["converged"] = e.converged;
    je["energy"] = e.energy;
    je["singular_origin"] = e.singular_origin;
    je["dist_origin_fb"] = e.dist_origin_fb;
    if (!e.error.empty()) je["error"] = e.error;
    j["entries"].push_back(je);
  }
  try {
    auto fits = fit_separation_exponents(report);
    j["linear_fit"] = {{"slope", fits.first.slope},
                       {"intercept", fits.first.intercept},
                       {"residual", fits.first.residual},
                       {"pairs", fits.first.pairs}};
    j["superlinear_fit"] = {{"slope", fits.second.slope},
                            {"intercept", fits.second.intercept},
                            {"residual", fits.second.residual},
                            {"pairs", fits.second.pairs}};
  } catch (const Error&) {
  }
  std::ofstream out(dir / "report.json", std::ios::binary);
  out << j.dump(1) << "\n";
}

int cmd_sweep(const std::string& geometry, const std::string& shape, const std::string& data,
              const std::string& tgrid, double R, double h, unsigned seed, bool svg,
              const std::string& out) {
  GridGeometry geom = parse_geometry(geometry, shape, R, h);
  TraceSpec trace = make_trace(data, geom);
  FamilySpec spec;
  spec.geometry = geom;
  spec.base_trace = trace.fn;
  spec.t_grid = parse_t_grid(tgrid, h);
  if (trace.is_cone)
    spec.classify.density_gap =
        (trace.profile.weiss_density - ball_volume(geom.rep_dim()) / 2) / 2;
  spec.solver.seed = seed;
  if (spec.t_grid.front() > 0.0) spec.t_grid.insert(spec.t_grid.begin(), 0.0);
  SweepReport report = run_family(spec);

  fs::path dir = out_root(out);
  RunConfig cfg;
  cfg.command = "sweep";
  cfg.geometry = geometry;
  cfg.shape = shape;
  cfg.data = data;
  cfg.t_grid = tgrid;
  cfg.radius = R;
  cfg.h = h;
  cfg.seed = seed;
  cfg.out_dir = dir.string();
  dump_config(cfg, dir);
  std::vector<std::vector<double>> prows;
  for (const auto& p : report.pairs) prows.push_back({p.s, p.t, p.dist_fb, p.dist_sing_fb});
  write_csv(dir / "pairs.csv", {"s", "t", "dist_fb", "dist_sing_fb"}, prows);

  std::vector<std::vector<double>> lrows;
  std::vector<double> sx, sy;
  for (const auto& p : report.pairs)
    if (std::isfinite(p.dist_sing_fb) && p.s == report.entries.front().t) {
      lrows.push_back({std::log(p.t - p.s), std::log(p.dist_sing_fb)});
      sx.push_back(p.t - p.s);
      sy.push_back(p.dist_sing_fb);
    }
  write_csv(dir / "loglog.csv", {"log_tau", "log_s"}, lrows);

  write_sweep_report(dir, report);
  if (svg) {
    std::vector<const FreeBoundaryCurve*> curves;
    for (const auto& e : report.entries)
      if (e.solved) curves.push_back(&e.fb);
    write_svg_polylines(dir / "fronts.svg", curves, R);
    if (!sx.empty()) write_svg_loglog(dir / "cleaning.svg", sx, sy);
  }
  try {
    auto fits = fit_separation_exponents(report);
    std::cout << "linear slope=" << format_real(fits.first.slope)
              << " superlinear slope=" << format_real(fits.second.slope) << "\n";
  } catch (const Error& e) {
    std::cout << "exponent fit unavailable: " << e.what() << "\n";
  }
  std::cout << "entries=" << report.entries.size() << " pairs=" << report.pairs.size()
            << " ordering_ok=" << (report.ordering_ok ? 1 : 0) << "\n";
  return 0;
}

int cmd_diagnose(const std::string& a, const std::string& b, double rho, const std::string& annuli,
                 const std::string& out) {
  auto stem_of = [](const std::string& p) {
    fs::path path(p);
    std::string stem = path.stem().string();
    if (stem.size() > 5 && stem.substr(stem.size() - 5) == ".json") stem.resize(stem.size() - 5);
    return std::pair{path.parent_path(), stem};
  };
  auto [da, sa] = stem_of(a);
  auto [db, sb] = stem_of(b);
  GridField u = read_field(da, sa);
  GridField v = read_field(db, sb);
  auto diags = difference_diagnostics(u, v, rho, parse_annuli(annuli));
  fs::path dir = out_root(out);
  fs::create_directories(dir);
  std::vector<std::vector<double>> rows;
  std::cout << "r,r_outer,harnack,decay,nodes_inner,nodes_outer\n";
  for (const auto& d : diags) {
    rows.push_back({d.r, d.r_outer, d.harnack, d.decay, double(d.nodes_inner),
                    double(d.nodes_outer)});
    std::cout << format_real(d.r) << "," << format_real(d.r_outer) << ","
              << format_real(d.harnack) << "," << format_real(d.decay) << "," << d.nodes_inner
              << "," << d.nodes_outer << "\n";
  }
  write_csv(dir / "diagnostics.csv", {"r", "r_outer", "harnack", "decay", "nodes_inner",
                                      "nodes_outer"},
            rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for one-phase Bernoulli free boundaries"};
  app.set_help_flag("--help", "print usage");
  app.require_subcommand(1);

  int dim = 7, n = 4096, samples = 4096;
  double tol = 1e-10, R = 1.0, h = 1.0 / 128, rho = 0.1;
  unsigned seed = 1234567;
  std::string split, dims = "7..14", geometry = "planar", shape = "disk", data = "flat:0.3";
  std::string tgrid = "log:1e-4:1e-1:9", annuli = "0.2:0.4", golden, out;
  bool svg = false;

  auto* cone = app.add_subcommand("cone", "construct a symmetric cone profile");
  cone->add_option("--dim", dim, "ambient dimension")->required()->check(CLI::Range(3, 32));
  cone->add_option("--split", split, "symmetry split M,K")->required();
  cone->add_option("--tol", tol, "certified tolerance on theta_fb");
  cone->add_option("--samples", samples, "profile sample intervals");
  cone->add_option("-o,--out", out, "output directory");

  auto* spectrum = app.add_subcommand("spectrum", "principal eigenvalue per split");
  spectrum->add_option("--dim", dim, "ambient dimension")->required()->check(CLI::Range(3, 32));
  spectrum->add_option("--split", split, "symmetry split M,K (default: all)");
  spectrum->add_option("-n", n, "grid intervals")->check(CLI::Range(64, 1 << 16));

  auto* table = app.add_subcommand("table", "eigenvalue/exponent table vs the reference");
  table->add_option("--dims", dims, "dimension range a..b");
  table->add_option("-n", n, "grid intervals")->check(CLI::Range(64, 1 << 16));
  table->add_option("--golden", golden, "golden file to regress against");
  table->add_option("-o,--out", out, "output directory");

  auto* solve = app.add_subcommand("solve", "minimize the grid energy");
  solve->add_option("--geometry", geometry, "planar | dp:M,K")->required();
  solve->add_option("--shape", shape, "disk | rect (planar only)");
  solve->add_option("--data", data, "flat:c | cone | file:PATH")->required();
  solve->add_option("--radius", R, "domain extent");
  solve->add_option("--h", h, "grid spacing")->required();
  solve->add_option("--seed", seed, "polish sweep seed");
  solve->add_option("-o,--out", out, "output directory");

  auto* sweep = app.add_subcommand("sweep", "boundary-data family sweep");
  sweep->add_option("--geometry", geometry, "planar | dp:M,K")->required();
  sweep->add_option("--shape", shape, "disk | rect (planar only)");
  sweep->add_option("--base", data, "flat:c | cone | file:PATH")->required();
  sweep->add_option("--t-grid", tgrid, "log:a:b:n | lin:a:b:n");
  sweep->add_option("--radius", R, "domain extent");
  sweep->add_option("--h", h, "grid spacing")->required();
  sweep->add_option("--seed", seed, "solver seed");
  sweep->add_flag("--svg", svg, "emit SVG plots");
  sweep->add_option("-o,--out", out, "output directory");

  std::vector<std::string> pair_paths;
  auto* diagnose = app.add_subcommand("diagnose", "difference diagnostics of a field pair");
  diagnose->add_option("--pair", pair_paths, "field pair (paths to .json sidecars)")
      ->expected(2)
      ->required();
  diagnose->add_option("--rho", rho, "regularity-scale filter");
  diagnose->add_option("--annuli", annuli, "r1:r2,r1:r2,...");
  diagnose->add_option("-o,--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cone) return cmd_cone(dim, split, tol, samples, out);
    if (*spectrum) return cmd_spectrum(dim, split, n);
    if (*table) return cmd_table(dims, n, golden, out);
    if (*solve) return cmd_solve(geometry, shape, data, R, h, seed, out);
    if (*sweep) return cmd_sweep(geometry, shape, data, tgrid, R, h, seed, svg, out);
    if (*diagnose) return cmd_diagnose(pair_paths[0], pair_paths[1], rho, annuli, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.kind() == ErrorKind::InvalidConfig || e.kind() == ErrorKind::SchemaMismatch) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
