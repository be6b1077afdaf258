#include "aclab/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace aclab {

using nlohmann::json;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidConfig, "cannot open " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_real(row[i]);
    out << "\n";
  }
}

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= p[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string file_hash_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidConfig, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes.data(), bytes.size())));
  return buf;
}

void write_profile(const std::filesystem::path& dir, const std::string& stem,
                   const ConeProfile& p) {
  std::filesystem::create_directories(dir);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < p.thetas.size(); ++i)
    rows.push_back({p.thetas[i], p.g[i], p.g_prime[i]});
  write_csv(dir / (stem + ".csv"), {"theta", "g", "g_prime"}, rows);

  json j;
  j["d"] = p.d;
  j["m"] = p.split.m;
  j["k"] = p.split.k;
  j["theta_fb"] = p.theta_fb;
  j["H"] = p.H;
  j["weiss_density"] = p.weiss_density;
  j["admissible"] = p.admissible;
  j["theta_tol"] = p.theta_tol;
  j["samples"] = p.thetas.size() - 1;
  std::ofstream out(dir / (stem + ".json"), std::ios::binary);
  out << j.dump(1) << "\n";
}

void write_table_csv(const std::filesystem::path& path, const std::vector<TableRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidConfig, "cannot open " + path.string());
  out << "d,m,k,theta_fb,H,lambda,gamma,table_delta,matched,selected\n";
  for (const auto& r : rows) {
    out << r.d << "," << r.m << "," << r.k << "," << format_real(r.theta_fb) << ","
        << format_real(r.H) << "," << format_real(r.lambda) << "," << format_real(r.gamma) << ","
        << format_real(r.table_delta) << "," << (r.matched ? 1 : 0) << ","
        << (r.selected ? 1 : 0) << "\n";
  }
}

namespace {

json geometry_to_json(const GridGeometry& g) {
  json j;
  j["mode"] = g.mode == GridMode::planar ? "planar" : "double_polar";
  j["shape"] = g.shape == DomainShape::disk
                   ? "disk"
                   : (g.shape == DomainShape::quarter_disk ? "quarter_disk" : "rectangle");
  j["m"] = g.split.m;
  j["k"] = g.split.k;
  j["R"] = g.R;
  j["h"] = g.h;
  return j;
}

GridGeometry geometry_from_json(const json& j) {
  GridGeometry g;
  std::string mode = j.at("mode");
  g.mode = mode == "planar" ? GridMode::planar : GridMode::double_polar;
  std::string shape = j.at("shape");
  g.shape = shape == "disk" ? DomainShape::disk
                            : (shape == "quarter_disk" ? DomainShape::quarter_disk
                                                       : DomainShape::rectangle);
  g.split = {j.at("m").get<int>(), j.at("k").get<int>()};
  g.R = j.at("R");
  g.h = j.at("h");
  g.finalize();
  return g;
}

}  // namespace

void write_field(const std::filesystem::path& dir, const std::string& stem, const GridField& f) {
  std::filesystem::create_directories(dir);
  auto bin = dir / (stem + ".bin");
  {
    std::ofstream out(bin, std::ios::binary);
    if (!out) fail(ErrorKind::InvalidConfig, "cannot open " + bin.string());
    out.write(reinterpret_cast<const char*>(f.u.data()),
              static_cast<std::streamsize>(f.u.size() * sizeof(double)));
  }
  json j = geometry_to_json(f.geom);
  j["energy"] = f.energy;
  j["sweeps"] = f.sweeps;
  j["converged"] = f.converged;
  j["nx"] = f.geom.nx;
  j["ny"] = f.geom.ny;
  j["hash"] = file_hash_hex(bin);
  std::ofstream out(dir / (stem + ".json"), std::ios::binary);
  out << j.dump(1) << "\n";
}

GridField read_field(const std::filesystem::path& dir, const std::string& stem) {
  std::ifstream meta(dir / (stem + ".json"));
  if (!meta) fail(ErrorKind::InvalidConfig, "cannot open " + (dir / (stem + ".json")).string());
  json j;
  try {
    meta >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaMismatch, e.what());
  }
  GridField f = make_field(geometry_from_json(j), [](double, double) { return 0.0; });
  std::ifstream in(dir / (stem + ".bin"), std::ios::binary);
  if (!in) fail(ErrorKind::InvalidConfig, "cannot open field data");
  in.read(reinterpret_cast<char*>(f.u.data()),
          static_cast<std::streamsize>(f.u.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(f.u.size() * sizeof(double)))
    fail(ErrorKind::SchemaMismatch, "field data size does not match the sidecar lattice");
  f.energy = j.at("energy");
  f.sweeps = j.at("sweeps");
  f.converged = j.at("converged");
  for (std::size_t id = 0; id < f.u.size(); ++id)
    if (f.cls[id] == NodeClass::dirichlet) f.boundary_trace[id] = f.u[id];
  return f;
}

void write_curve_csv(const std::filesystem::path& path, const FreeBoundaryCurve& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidConfig, "cannot open " + path.string());
  out << "x1,y1,x2,y2\n";
  for (const auto& s : c.segments)
    out << format_real(s[0]) << "," << format_real(s[1]) << "," << format_real(s[2]) << ","
        << format_real(s[3]) << "\n";
}

void write_series_csv(const std::filesystem::path& path, const WeissSeries& s) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < s.radii.size(); ++i) rows.push_back({s.radii[i], s.values[i]});
  write_csv(path, {"r", "weiss"}, rows);
}

void write_svg_polylines(const std::filesystem::path& path,
                         const std::vector<const FreeBoundaryCurve*>& curves, double extent) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidConfig, "cannot open " + path.string());
  const double s = 400.0 / (2 * extent);
  auto tx = [&](double x) { return 400.0 + s * x; };
  auto ty = [&](double y) { return 400.0 - s * y; };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\">\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};
  for (std::size_t c = 0; c < curves.size(); ++c) {
    for (const auto& seg : curves[c]->segments)
      out << "<line x1=\"" << tx(seg[0]) << "\" y1=\"" << ty(seg[1]) << "\" x2=\"" << tx(seg[2])
          << "\" y2=\"" << ty(seg[3]) << "\" stroke=\"" << colors[c % 6]
          << "\" stroke-width=\"1\"/>\n";
  }
  out << "</svg>\n";
}

void write_svg_loglog(const std::filesystem::path& path, const std::vector<double>& x,
                      const std::vector<double>& y) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidConfig, "cannot open " + path.string());
  double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx0 = std::min(lx0, std::log10(x[i]));
    lx1 = std::max(lx1, std::log10(x[i]));
    ly0 = std::min(ly0, std::log10(y[i]));
    ly1 = std::max(ly1, std::log10(y[i]));
  }
  auto tx = [&](double v) { return 40 + 720 * (std::log10(v) - lx0) / std::max(1e-12, lx1 - lx0); };
  auto ty = [&](double v) { return 760 - 720 * (std::log10(v) - ly0) / std::max(1e-12, ly1 - ly0); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\">\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out << "<circle cx=\"" << tx(x[i]) << "\" cy=\"" << ty(y[i]) << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
  out << "</svg>\n";
}

void save_golden(const std::filesystem::path& path, const std::vector<GoldenRecord>& records) {
  json j;
  j["records"] = json::array();
  for (const auto& r : records) {
    json e;
    e["key"] = r.key;
    e["value"] = r.value;
    e["provenance"] = r.provenance;
    e["tolerance"] = r.tolerance;
    j["records"].push_back(e);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidConfig, "cannot open " + path.string());
  out << j.dump(1) << "\n";
}

std::vector<GoldenRecord> load_golden(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidConfig, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaMismatch, path.string() + ": " + e.what());
  }
  std::vector<GoldenRecord> out;
  try {
    for (const auto& e : j.at("records")) {
      GoldenRecord r;
      r.key = e.at("key");
      r.value = e.at("value");
      r.provenance = e.at("provenance");
      r.tolerance = e.at("tolerance");
      if (r.provenance != "reference_table" && r.provenance != "derived_oracle" &&
          r.provenance != "closed_form")
        fail(ErrorKind::SchemaMismatch, "unknown provenance '" + r.provenance + "'");
      out.push_back(r);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaMismatch, path.string() + ": " + e.what());
  }
  return out;
}

RegressionReport regression_check(const std::vector<GoldenRecord>& golden,
                                  const std::vector<GoldenRecord>& produced) {
  RegressionReport rep;
  for (const auto& g : golden) {
    const GoldenRecord* match = nullptr;
    for (const auto& p : produced)
      if (p.key == g.key) {
        match = &p;
        break;
      }
    if (!match) fail(ErrorKind::MissingKey, "produced records lack key '" + g.key + "'");
    double dev = std::abs(match->value - g.value);
    rep.max_abs_dev = std::max(rep.max_abs_dev, dev);
    rep.max_rel_dev = std::max(rep.max_rel_dev, dev / std::max(1e-300, std::abs(g.value)));
    if (dev > g.tolerance) {
      rep.ok = false;
      rep.failures.push_back(g.key + ": produced " + format_real(match->value) + " vs golden " +
                             format_real(g.value) + " (tolerance " + format_real(g.tolerance) +
                             ")");
    }
  }
  return rep;
}

RegressionReport regression_check(const std::filesystem::path& golden_path,
                                  const std::filesystem::path& produced_path) {
  return regression_check(load_golden(golden_path), load_golden(produced_path));
}

std::string RunConfig::to_json() const {
  json j;
  j["command"] = command;
  j["dim"] = dim;
  j["m"] = m;
  j["k"] = k;
  j["n"] = n;
  j["d_min"] = d_min;
  j["d_max"] = d_max;
  j["geometry"] = geometry;
  j["shape"] = shape;
  j["data"] = data;
  j["radius"] = radius;
  j["h"] = h;
  j["tol"] = tol;
  j["t_grid"] = t_grid;
  j["rho"] = rho;
  j["annuli"] = annuli;
  j["pair_a"] = pair_a;
  j["pair_b"] = pair_b;
  j["golden"] = golden;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  return j.dump(1);
}

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaMismatch, e.what());
  }
  static const char* known[] = {"command", "dim",   "m",     "k",      "n",       "d_min",
                                "d_max",   "geometry", "shape", "data", "radius", "h",
                                "tol",     "t_grid", "rho",   "annuli", "pair_a",  "pair_b",
                                "golden",  "out_dir", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail(ErrorKind::InvalidConfig, "unknown config key '" + it.key() + "'");
  }
  RunConfig c;
  try {
    c.command = j.at("command");
    c.dim = j.at("dim");
    c.m = j.at("m");
    c.k = j.at("k");
    c.n = j.at("n");
    c.d_min = j.at("d_min");
    c.d_max = j.at("d_max");
    c.geometry = j.at("geometry");
    c.shape = j.at("shape");
    c.data = j.at("data");
    c.radius = j.at("radius");
    c.h = j.at("h");
    c.tol = j.at("tol");
    c.t_grid = j.at("t_grid");
    c.rho = j.at("rho");
    c.annuli = j.at("annuli");
    c.pair_a = j.at("pair_a");
    c.pair_b = j.at("pair_b");
    c.golden = j.at("golden");
    c.out_dir = j.at("out_dir");
    c.seed = j.at("seed");
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaMismatch, e.what());
  }
  return c;
}

}  // namespace aclab
