#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "bosoncpa/linalg.hpp"
#include "bosoncpa/model.hpp"
#include "bosoncpa/parallel.hpp"

namespace bosoncpa {

/// Fixed block matrices of the per-site phase space C^2 (x) C^N, extended
/// block-diagonally over `sites` in the site-major basis.
struct SymplecticStructure {
  int bands = 1;

  ComplexMatrix J(std::size_t sites = 1) const;       // [[0, 1], [-1, 0]] (x) Id_N
  ComplexMatrix sigma3(std::size_t sites = 1) const;  // diag(Id_N, -Id_N)
  ComplexMatrix sigma1(std::size_t sites = 1) const;  // [[0, 1], [1, 0]] (x) Id_N
  Eigen::VectorXd sigma3_diagonal(std::size_t sites = 1) const;
};

/// One site's random operator. A holds the M x N free Gaussian entries; the
/// reality condition conj(L) = L Sigma1 is solved by L = (A | conj(A)).
struct RandomBlock {
  std::size_t site = 0;
  ComplexMatrix A;

  ComplexMatrix L() const;
};

/// Independent stream for sample `index` of a run seeded with `seed`.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

/// Draws A with Re, Im i.i.d. N(0, b/(4N)), i.e. E|A_mn|^2 = b/(2N).
RandomBlock sample_block(const ModelParams& params, std::mt19937_64& rng,
                         std::size_t site = 0);

/// R = -i Sigma3 L^dagger L.
ComplexMatrix local_R(const RandomBlock& block);

/// H = i Sigma3 K + blockdiag_j(L_j^dagger L_j) = i Sigma3 X.
/// With check_cone, a minimum eigenvalue below -1e-10 ||H|| raises
/// ConeViolation.
HermitianMatrix assemble_H(const ModelParams& params,
                           std::span<const RandomBlock> blocks,
                           const SparseComplexMatrix& K, bool check_cone = true);

struct EnsembleSample {
  std::vector<RandomBlock> blocks;
  HermitianMatrix H;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

EnsembleSample draw_sample(const ModelParams& params,
                           const SparseComplexMatrix& K, std::uint64_t seed,
                           std::uint64_t index);

/// Real frequencies mu, ascending, such that the eigenvalues of
/// X = -i Sigma3 H are -i mu. Computed as eig(C^dagger Sigma3 C) with
/// H (+ shift) = C C^dagger. Returns all 2N|Lambda| values (paired +-mu).
std::vector<double> spectrum_X(const HermitianMatrix& H, int bands,
                               std::size_t sites, double shift_tol = 1e-10);

/// Histogram of |mu| over samples, normalized to the two-sided density:
/// density_i = counts_i / (2 * total * width_i), so that
/// 2 * sum(density * width) + zero_fraction + overflow_fraction = 1.
struct SpectrumHistogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total_eigenvalues = 0;
  std::uint64_t zero_mode_count = 0;
  std::uint64_t overflow_count = 0;  // |mu| > bin_edges.back()
  std::uint64_t samples = 0;

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
  double center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
  double density(std::size_t i) const;
  std::vector<double> densities() const;
  double zero_fraction() const;
  /// 2 * sum(density * width).
  double normalized_integral() const;
};

struct McOptions {
  std::size_t samples = 100;
  int bins = 100;
  std::uint64_t seed = 1;
  double omega_max = 0.0;      // <= 0: largest sampled |mu|
  double zero_tol_rel = 1e-8;  // zero modes: |mu| <= zero_tol_rel * median|mu|
  double shift_tol = 1e-10;
  Execution exec = Execution::kParallel;
};

/// Monte Carlo density of eigenfrequencies. Samples are independent and run
/// in parallel; the histogram depends only on (params, options), not on the
/// thread count.
SpectrumHistogram mc_dos(const ModelParams& params, const McOptions& options);

}  // namespace bosoncpa
