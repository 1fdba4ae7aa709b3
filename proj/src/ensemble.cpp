#include "bosoncpa/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

#include "bosoncpa/errors.hpp"

namespace bosoncpa {

ComplexMatrix SymplecticStructure::J(std::size_t sites) const {
  const Eigen::Index n = bands;
  const auto dim = static_cast<Eigen::Index>(2 * bands * sites);
  ComplexMatrix j = ComplexMatrix::Zero(dim, dim);
  for (std::size_t s = 0; s < sites; ++s) {
    const auto o = static_cast<Eigen::Index>(2 * bands * s);
    j.block(o, o + n, n, n).setIdentity();
    j.block(o + n, o, n, n) = -ComplexMatrix::Identity(n, n);
  }
  return j;
}

ComplexMatrix SymplecticStructure::sigma3(std::size_t sites) const {
  return sigma3_diagonal(sites).cast<Complex>().asDiagonal();
}

ComplexMatrix SymplecticStructure::sigma1(std::size_t sites) const {
  const Eigen::Index n = bands;
  const auto dim = static_cast<Eigen::Index>(2 * bands * sites);
  ComplexMatrix s1 = ComplexMatrix::Zero(dim, dim);
  for (std::size_t s = 0; s < sites; ++s) {
    const auto o = static_cast<Eigen::Index>(2 * bands * s);
    s1.block(o, o + n, n, n).setIdentity();
    s1.block(o + n, o, n, n).setIdentity();
  }
  return s1;
}

Eigen::VectorXd SymplecticStructure::sigma3_diagonal(std::size_t sites) const {
  const auto dim = static_cast<Eigen::Index>(2 * bands * sites);
  Eigen::VectorXd d(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    d(i) = (i % (2 * bands)) < bands ? 1.0 : -1.0;
  return d;
}

ComplexMatrix RandomBlock::L() const {
  ComplexMatrix l(A.rows(), 2 * A.cols());
  l << A, A.conjugate();
  return l;
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

RandomBlock sample_block(const ModelParams& params, std::mt19937_64& rng,
                         std::size_t site) {
  if (!params.bands || !params.aux_dim)
    throw ArgumentError("sample_block needs N and M");
  if (!(params.b >= 0.0)) throw ArgumentError("b must be >= 0");
  const int n = *params.bands;
  const int m = *params.aux_dim;
  RandomBlock block;
  block.site = site;
  block.A = ComplexMatrix::Zero(m, n);
  if (params.b == 0.0) return block;
  std::normal_distribution<double> gauss(0.0, std::sqrt(params.b / (4.0 * n)));
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      block.A(r, c) = Complex(re, im);
    }
  return block;
}

ComplexMatrix local_R(const RandomBlock& block) {
  const auto n = static_cast<int>(block.A.cols());
  const ComplexMatrix l = block.L();
  const ComplexMatrix ll = l.adjoint() * l;
  const Eigen::VectorXd s3 = SymplecticStructure{n}.sigma3_diagonal();
  return Complex(0.0, -1.0) * (s3.cast<Complex>().asDiagonal() * ll);
}

HermitianMatrix assemble_H(const ModelParams& params,
                           std::span<const RandomBlock> blocks,
                           const SparseComplexMatrix& K, bool check_cone) {
  if (!params.bands) throw ArgumentError("assemble_H needs N");
  const int n = *params.bands;
  const std::size_t sites = params.site_count();
  const auto dim = static_cast<Eigen::Index>(2 * n * sites);
  if (K.rows() != dim || K.cols() != dim)
    throw ArgumentError("K does not match the lattice dimension");
  if (blocks.size() != sites) throw ArgumentError("need one random block per site");

  const Eigen::VectorXd s3 = SymplecticStructure{n}.sigma3_diagonal(sites);
  // i Sigma3 K, entrywise from the sparse K.
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int col = 0; col < K.outerSize(); ++col)
    for (SparseComplexMatrix::InnerIterator it(K, col); it; ++it)
      h(it.row(), it.col()) += Complex(0.0, s3(it.row())) * it.value();

  for (const RandomBlock& blk : blocks) {
    if (blk.site >= sites) throw ArgumentError("random block site out of range");
    const ComplexMatrix l = blk.L();
    const auto o = static_cast<Eigen::Index>(2 * n * blk.site);
    h.block(o, o, 2 * n, 2 * n).noalias() += l.adjoint() * l;
  }
  HermitianMatrix H(std::move(h), 1e-12);
  if (check_cone) (void)cholesky_psd(H, 1e-10);
  return H;
}

EnsembleSample draw_sample(const ModelParams& params,
                           const SparseComplexMatrix& K, std::uint64_t seed,
                           std::uint64_t index) {
  auto rng = sample_rng(seed, index);
  std::vector<RandomBlock> blocks;
  const std::size_t sites = params.site_count();
  blocks.reserve(sites);
  for (std::size_t s = 0; s < sites; ++s) blocks.push_back(sample_block(params, rng, s));
  HermitianMatrix H = assemble_H(params, blocks, K, false);
  return {std::move(blocks), std::move(H), seed, index};
}

std::vector<double> spectrum_X(const HermitianMatrix& H, int bands,
                               std::size_t sites, double shift_tol) {
  if (H.dim() != static_cast<Eigen::Index>(2 * bands * sites))
    throw ArgumentError("H does not match 2N|Lambda|");
  CholeskyFactor c;
  try {
    c = cholesky_psd(H, shift_tol);
  } catch (const ConeViolation& e) {
    throw ConeViolation(std::string("generator outside the positive cone: ") + e.what());
  }
  const Eigen::VectorXd s3 = SymplecticStructure{bands}.sigma3_diagonal(sites);
  const ComplexMatrix reduced =
      c.lower.adjoint() * (s3.cast<Complex>().asDiagonal() * c.lower);
  const auto eig = hermitian_eig(HermitianMatrix(reduced, 1e-10));
  return {eig.eigenvalues.data(), eig.eigenvalues.data() + eig.eigenvalues.size()};
}

double SpectrumHistogram::density(std::size_t i) const {
  if (total_eigenvalues == 0) return 0.0;
  return static_cast<double>(counts[i]) /
         (2.0 * static_cast<double>(total_eigenvalues) * width(i));
}

std::vector<double> SpectrumHistogram::densities() const {
  std::vector<double> d(bins());
  for (std::size_t i = 0; i < bins(); ++i) d[i] = density(i);
  return d;
}

double SpectrumHistogram::zero_fraction() const {
  return total_eigenvalues
             ? static_cast<double>(zero_mode_count) / static_cast<double>(total_eigenvalues)
             : 0.0;
}

double SpectrumHistogram::normalized_integral() const {
  std::uint64_t in_bins = 0;
  for (auto c : counts) in_bins += c;
  return total_eigenvalues
             ? static_cast<double>(in_bins) / static_cast<double>(total_eigenvalues)
             : 0.0;
}

namespace {

struct SampleResult {
  std::vector<double> abs_mu;  // nonzero modes
  std::uint64_t zeros = 0;
  std::uint64_t total = 0;
};

SampleResult run_sample(const ModelParams& params, const SparseComplexMatrix& K,
                        const McOptions& opt, std::uint64_t index) {
  const EnsembleSample s = draw_sample(params, K, opt.seed, index);
  const auto mu = spectrum_X(s.H, *params.bands, params.site_count(), opt.shift_tol);
  std::vector<double> abs_mu(mu.size());
  std::transform(mu.begin(), mu.end(), abs_mu.begin(), [](double x) { return std::abs(x); });
  std::vector<double> sorted = abs_mu;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double zero_tol = opt.zero_tol_rel * sorted[sorted.size() / 2];

  SampleResult r;
  r.total = abs_mu.size();
  r.abs_mu.reserve(abs_mu.size());
  for (double x : abs_mu) {
    if (x <= zero_tol) ++r.zeros; else r.abs_mu.push_back(x);
  }
  return r;
}

}  // namespace

SpectrumHistogram mc_dos(const ModelParams& params, const McOptions& opt) {
  params.validate_for_sampling();
  if (opt.samples < 1) throw ArgumentError("n_samples must be >= 1");
  if (opt.bins < 1) throw ArgumentError("bins must be >= 1");
  if (!(opt.zero_tol_rel >= 0.0)) throw ArgumentError("zero_tol_rel must be >= 0");

  const SparseComplexMatrix K = assemble_K(params);
  std::vector<SampleResult> results(opt.samples);

  if (opt.exec == Execution::kParallel) {
    std::exception_ptr error;
    std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(opt.samples); ++i) {
      try {
        results[static_cast<std::size_t>(i)] =
            run_sample(params, K, opt, static_cast<std::uint64_t>(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (std::size_t i = 0; i < opt.samples; ++i) results[i] = run_sample(params, K, opt, i);
  }

  double omega_max = opt.omega_max;
  if (!(omega_max > 0.0)) {
    omega_max = 0.0;
    for (const auto& r : results)
      for (double x : r.abs_mu) omega_max = std::max(omega_max, x);
    if (omega_max == 0.0) omega_max = 1.0;
  }

  SpectrumHistogram h;
  h.samples = opt.samples;
  h.bin_edges.resize(static_cast<std::size_t>(opt.bins) + 1);
  for (int i = 0; i <= opt.bins; ++i)
    h.bin_edges[static_cast<std::size_t>(i)] = omega_max * i / opt.bins;
  h.counts.assign(static_cast<std::size_t>(opt.bins), 0);
  const double inv_width = opt.bins / omega_max;
  for (const auto& r : results) {
    h.total_eigenvalues += r.total;
    h.zero_mode_count += r.zeros;
    for (double x : r.abs_mu) {
      if (x > omega_max) {
        ++h.overflow_count;
        continue;
      }
      auto bin = static_cast<std::size_t>(x * inv_width);
      if (bin >= h.counts.size()) bin = h.counts.size() - 1;
      ++h.counts[bin];
    }
  }
  return h;
}

}  // namespace bosoncpa
