#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bosoncpa/cpa.hpp"
#include "bosoncpa/ensemble.hpp"

namespace bosoncpa {

/// Parsed command line. Every field has a default; see `bosoncpa --help`.
struct RunConfig {
  std::string mode;  // cpa-dos | rmt-dos | mc-dos | solve-p | compare

  int d = 1;
  std::vector<int> extents;  // mc-dos: defaults to 32 per axis
  std::optional<int> N;
  std::optional<int> M;
  std::optional<double> a;  // default 1 in CPA modes, M/(2N) when sampling
  double b = 1.0;
  std::optional<double> nu;  // default 1, or 0 when d = 0

  double omega_min = 0.0;  // 0: grid omega_max * i / steps, i = 1..steps
  double omega_max = 3.0;
  int omega_steps = 300;
  double eps = 0.0;  // <= 0: default_eps(params)
  int kgrid = 0;     // <= 0: QuadratureSpec::defaults_for(d)
  std::string quadrature = "analytic";
  bool check_quadrature = false;
  bool richardson = false;
  bool descending = false;

  std::size_t samples = 100;
  int bins = 100;
  std::uint64_t seed = 1;
  double hist_max = 0.0;  // <= 0: largest sampled |mu|

  double z_re = 1.0;
  double z_im = 0.0;

  std::string cpa_path;
  std::string mc_path;
  double threshold = 0.05;

  int threads = 0;  // <= 0: OpenMP default
  std::string out;  // empty: standard output
};

ModelParams model_params(const RunConfig& cfg);
std::vector<double> omega_grid(const RunConfig& cfg);

/// CPA-vs-MC discrepancy on the histogram bins. The CPA curve is linearly
/// interpolated at bin centres; below its first point it is held constant,
/// above its last point it is taken as zero.
struct CompareResult {
  double l1 = 0.0;             // sum_i |rho_mc - rho_cpa| * width_i
  double max_deviation = 0.0;  // max_i |rho_mc - rho_cpa|
  std::size_t bins = 0;
  std::size_t bins_outside_curve = 0;
};

CompareResult compare_curves(const DosCurve& cpa, const SpectrumHistogram& mc);

/// Executes a parsed configuration. Exit codes: 0 success, 1 numerical or
/// I/O failure, 2 invalid arguments, 3 compare above threshold.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and runs. --help lists modes and flags.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bosoncpa
