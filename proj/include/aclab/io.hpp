#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aclab/cone_profile.hpp"
#include "aclab/grid_analysis.hpp"
#include "aclab/jacobi_spectrum.hpp"
#include "aclab/sweep.hpp"

namespace aclab {

// reals are emitted with 17 significant digits, '.' decimal, LF line endings,
// so produced files diff byte-stable across runs
std::string format_real(double v);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::uint64_t fnv1a(const void* data, std::size_t n);
std::string file_hash_hex(const std::filesystem::path& path);

// profile: CSV (theta, g, g_prime) + JSON header
void write_profile(const std::filesystem::path& dir, const std::string& stem,
                   const ConeProfile& p);

void write_table_csv(const std::filesystem::path& path, const std::vector<TableRow>& rows);

// field snapshot: flat binary array (row-major lattice) + JSON sidecar
void write_field(const std::filesystem::path& dir, const std::string& stem, const GridField& f);
GridField read_field(const std::filesystem::path& dir, const std::string& stem);

void write_curve_csv(const std::filesystem::path& path, const FreeBoundaryCurve& c);
void write_series_csv(const std::filesystem::path& path, const WeissSeries& s);

void write_svg_polylines(const std::filesystem::path& path,
                         const std::vector<const FreeBoundaryCurve*>& curves, double extent);
void write_svg_loglog(const std::filesystem::path& path, const std::vector<double>& x,
                      const std::vector<double>& y);

// golden regression records
struct GoldenRecord {
  std::string key;
  double value = 0.0;
  std::string provenance;  // reference_table | derived_oracle | closed_form
  double tolerance = 0.0;
};

void save_golden(const std::filesystem::path& path, const std::vector<GoldenRecord>& records);
std::vector<GoldenRecord> load_golden(const std::filesystem::path& path);

struct RegressionReport {
  bool ok = true;
  double max_abs_dev = 0.0;
  double max_rel_dev = 0.0;
  std::vector<std::string> failures;
};

// per-key comparison of produced against golden, each at its own tolerance
RegressionReport regression_check(const std::filesystem::path& golden_path,
                                  const std::filesystem::path& produced_path);
RegressionReport regression_check(const std::vector<GoldenRecord>& golden,
                                  const std::vector<GoldenRecord>& produced);

// strict run configuration (unknown keys rejected)
struct RunConfig {
  std::string command;
  int dim = 0;
  int m = 0, k = 0;
  int n = 4096;
  int d_min = 7, d_max = 14;
  std::string geometry;  // "planar" or "dp:M,K"
  std::string shape = "disk";
  std::string data;      // "flat:c" | "cone" | "file:PATH"
  double radius = 1.0;
  double h = 1.0 / 128;
  double tol = 1e-10;
  std::string t_grid;    // "log:a:b:n" | "lin:a:b:n"
  double rho = 0.1;
  std::string annuli;
  std::string pair_a, pair_b;
  std::string golden;
  std::string out_dir = ".";
  unsigned seed = 1234567;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  bool operator==(const RunConfig&) const = default;
};

}  // namespace aclab
