#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bosoncpa/cli.hpp"
#include "bosoncpa/cpa.hpp"
#include "bosoncpa/ensemble.hpp"
#include "bosoncpa/errors.hpp"
#include "oracles.hpp"

using namespace bosoncpa;
using std::numbers::pi;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("symplectic structure identities") {
  for (int n : {1, 3}) {
    const SymplecticStructure s{n};
    const ComplexMatrix J = s.J(2), S3 = s.sigma3(2), S1 = s.sigma1(2);
    const auto I = ComplexMatrix::Identity(4 * n, 4 * n);
    CHECK(max_abs(J * J + I) == 0.0);
    CHECK(max_abs(S3 * S3 - I) == 0.0);
    CHECK(max_abs(S1 * S1 - I) == 0.0);
    CHECK(max_abs(S1 * S3 + S3 * S1) == 0.0);
  }
}

TEST_CASE("sample_block satisfies the reality condition") {
  auto params = ModelParams::with_dims(0, {}, 3, 5, 0.8, 0.0);
  auto rng = sample_rng(42, 0);
  const auto blk = sample_block(params, rng);
  const ComplexMatrix L = blk.L();
  CHECK(L.rows() == 5);
  CHECK(L.cols() == 6);
  CHECK(max_abs(L.conjugate() - L * SymplecticStructure{3}.sigma1()) == 0.0);

  auto zero = ModelParams::with_dims(1, {4}, 3, 5, 0.0, 1.0);
  CHECK(max_abs(sample_block(zero, rng).L()) == 0.0);
}

TEST_CASE("Gaussian moment: E Tr L^dagger L = M b") {
  const int N = 3, M = 4;
  const double b = 0.7;
  const auto params = ModelParams::with_dims(0, {}, N, M, b, 0.0);
  const int draws = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    auto rng = sample_rng(2024, static_cast<std::uint64_t>(i));
    const ComplexMatrix L = sample_block(params, rng).L();
    const double t = (L.adjoint() * L).trace().real();
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - M * b) <= 3.0 * se);
}

TEST_CASE("local_R: symplectic condition and positivity") {
  for (auto [N, M] : {std::pair{2, 4}, std::pair{3, 2}, std::pair{2, 7}}) {
    const auto params = ModelParams::with_dims(0, {}, N, M, 1.0, 0.0);
    auto rng = sample_rng(5, static_cast<std::uint64_t>(N * 100 + M));
    const auto blk = sample_block(params, rng);
    const ComplexMatrix R = local_R(blk);
    const SymplecticStructure s{N};
    const ComplexMatrix J = s.J();
    const ComplexMatrix Jinv = -J;
    CHECK(max_abs(R + J * R.transpose() * Jinv) <= 1e-13 * max_abs(R));
    const ComplexMatrix LL = blk.L().adjoint() * blk.L();
    CHECK(max_abs(Complex(0.0, 1.0) * s.sigma3() * R - LL) <= 1e-14 * max_abs(LL));
    const auto eig = hermitian_eig(HermitianMatrix(LL, 1e-10)).eigenvalues;
    const double tol = 1e-10 * eig.maxCoeff();
    const int rank = static_cast<int>((eig.array() > tol).count());
    CHECK(rank == std::min(M, 2 * N));
    CHECK(eig.minCoeff() >= -tol);
    if (M == 2 * N) CHECK(eig.minCoeff() > tol);
  }
}

TEST_CASE("assemble_H: clean lattice spectrum per wavevector") {
  const int L = 8;
  const double nu = 1.3;
  const auto params = ModelParams::with_dims(1, {L}, 2, 4, 0.0, nu);
  const auto K = assemble_K(params);
  std::vector<RandomBlock> blocks;
  auto rng = sample_rng(1, 0);
  for (int s = 0; s < L; ++s) blocks.push_back(sample_block(params, rng, static_cast<std::size_t>(s)));
  const auto H = assemble_H(params, blocks, K);
  CHECK(max_abs(H.matrix() - H.matrix().adjoint()) <= 1e-13);
  std::vector<double> expect;
  for (int m = 0; m < L; ++m) {
    const double delta = std::cos(2 * pi * m / L);
    for (int n = 0; n < 2; ++n) {
      expect.push_back(nu);
      expect.push_back(nu * (1.0 - delta));
    }
  }
  const auto eig = hermitian_eig(H).eigenvalues;
  const auto ex = sorted(expect);
  for (std::size_t i = 0; i < ex.size(); ++i)
    CHECK(std::abs(eig(static_cast<Eigen::Index>(i)) - ex[i]) < 1e-12);
}

TEST_CASE("assemble_H: single site random-matrix case is L^dagger L") {
  const auto params = ModelParams::with_dims(0, {}, 3, 4, 0.9, 0.0);
  const auto K = assemble_K(params);
  auto rng = sample_rng(3, 3);
  std::vector<RandomBlock> blocks{sample_block(params, rng)};
  const auto H = assemble_H(params, blocks, K);
  const ComplexMatrix L = blocks[0].L();
  CHECK(max_abs(H.matrix() - L.adjoint() * L) < 1e-15);
}

TEST_CASE("assemble_H rejects generators outside the cone") {
  const auto params = ModelParams::with_dims(1, {4}, 1, 2, 0.0, 1.0);
  const SparseComplexMatrix bad = -assemble_K(params);
  auto rng = sample_rng(1, 1);
  std::vector<RandomBlock> blocks;
  for (int s = 0; s < 4; ++s) blocks.push_back(sample_block(params, rng, static_cast<std::size_t>(s)));
  CHECK_THROWS_AS(assemble_H(params, blocks, bad), ConeViolation);
  CHECK_NOTHROW(assemble_H(params, blocks, bad, false));
  blocks.pop_back();
  CHECK_THROWS_AS(assemble_H(params, blocks, assemble_K(params)), ArgumentError);
}

TEST_CASE("spectrum_X of the clean chain is the dispersion") {
  const int L = 8;
  const auto params = ModelParams::with_dims(1, {L}, 1, 2, 0.0, 1.0);
  const auto s = draw_sample(params, assemble_K(params), 1, 0);
  const auto mu = spectrum_X(s.H, 1, L);
  REQUIRE(mu.size() == 2 * L);
  std::vector<double> absmu;
  for (double x : mu) absmu.push_back(std::abs(x));
  absmu = sorted(absmu);
  std::vector<double> expect;
  for (int m = 0; m < L; ++m) {
    const double e = dispersion(Wavevector{2 * pi * m / L}, 1.0);
    expect.push_back(e);
    expect.push_back(e);
  }
  expect = sorted(expect);
  // the k = 0 acoustic pair sits on the boundary of the cone
  CHECK(absmu[0] < 1e-4);
  CHECK(absmu[1] < 1e-4);
  for (std::size_t i = 2; i < expect.size(); ++i) CHECK(std::abs(absmu[i] - expect[i]) < 1e-9);
}

TEST_CASE("spectrum_X comes in +- pairs") {
  for (auto params : {ModelParams::with_dims(1, {6}, 2, 3, 0.6, 1.0),
                      ModelParams::with_dims(0, {}, 8, 12, 1.0, 0.0),
                      ModelParams::with_dims(2, {3, 4}, 1, 2, 0.3, 0.8)}) {
    const auto K = assemble_K(params);
    for (std::uint64_t i = 0; i < 5; ++i) {
      const auto s = draw_sample(params, K, 77, i);
      const auto mu = sorted(spectrum_X(s.H, *params.bands, params.site_count()));
      for (std::size_t j = 0; j < mu.size(); ++j) CHECK(std::abs(mu[j] + mu[mu.size() - 1 - j]) < 1e-9);
    }
  }
}

TEST_CASE("spectrum_X matches the characteristic polynomial of X at small size") {
  for (auto params : {ModelParams::with_dims(0, {}, 2, 3, 1.0, 0.0),
                      ModelParams::with_dims(0, {}, 4, 8, 0.5, 0.0),
                      ModelParams::with_dims(1, {3}, 1, 2, 0.5, 1.0)}) {
    const auto K = assemble_K(params);
    const int N = *params.bands;
    const auto sites = params.site_count();
    for (std::uint64_t i = 0; i < 3; ++i) {
      const auto s = draw_sample(params, K, 9, i);
      const ComplexMatrix X = Complex(0.0, -1.0) * SymplecticStructure{N}.sigma3(sites) * s.H.matrix();
      auto roots = oracle::poly_roots(oracle::char_poly(X));
      const auto mu = spectrum_X(s.H, N, sites);
      // eigenvalues of X are -i mu
      std::vector<double> from_poly;
      for (auto r : roots) {
        CHECK(std::abs(r.real()) < 1e-8);
        from_poly.push_back(-r.imag());
      }
      from_poly = sorted(from_poly);
      const auto ours = sorted(mu);
      for (std::size_t j = 0; j < ours.size(); ++j) CHECK(std::abs(ours[j] - from_poly[j]) < 1e-8);
    }
  }
}

TEST_CASE("cone membership of sampled generators") {
  const auto params = ModelParams::with_dims(1, {8}, 2, 3, 0.63, 1.0);
  const auto K = assemble_K(params);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto s = draw_sample(params, K, 123, i);
    const auto eig = hermitian_eig(s.H).eigenvalues;
    CHECK(eig.minCoeff() >= -1e-10 * s.H.norm());
  }
}

TEST_CASE("moment check: trace of H") {
  const auto params = ModelParams::with_dims(1, {6}, 2, 3, 0.5, 1.0);
  const auto K = assemble_K(params);
  const double dim = 2.0 * 2 * 6;
  const Eigen::VectorXd s3 = SymplecticStructure{2}.sigma3_diagonal(6);
  const Eigen::MatrixXcd Kd(K);
  const double clean = (Complex(0.0, 1.0) * s3.cast<Complex>().asDiagonal() * Kd).trace().real() / dim;
  const int n = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto s = draw_sample(params, K, 31, static_cast<std::uint64_t>(i));
    const double t = s.H.matrix().trace().real() / dim;
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - (clean + 3 * 0.5 / (2.0 * 2))) <= 3.0 * se);
}

TEST_CASE("zero-mode fraction follows rank-nullity") {
  McOptions opt;
  opt.samples = 20;
  opt.bins = 10;
  const auto h = mc_dos(ModelParams::with_dims(0, {}, 8, 12, 1.0, 0.0), opt);
  CHECK(h.zero_mode_count * 4 == h.total_eigenvalues);
  CHECK(h.zero_fraction() == 0.25);
  const auto full = mc_dos(ModelParams::with_dims(0, {}, 8, 16, 1.0, 0.0), opt);
  CHECK(full.zero_mode_count == 0);
}

TEST_CASE("histogram bookkeeping and normalization") {
  McOptions opt;
  opt.samples = 30;
  opt.bins = 25;
  const auto h = mc_dos(ModelParams::with_dims(0, {}, 6, 9, 1.0, 0.0), opt);
  std::uint64_t in_bins = 0;
  for (auto c : h.counts) in_bins += c;
  CHECK(in_bins + h.zero_mode_count + h.overflow_count == h.total_eigenvalues);
  CHECK(h.overflow_count == 0);
  double integral = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) integral += 2.0 * h.density(i) * h.width(i);
  CHECK(std::abs(integral + h.zero_fraction() - 1.0) <= 1e-12);
  CHECK(std::abs(h.normalized_integral() - integral) <= 1e-12);

  opt.omega_max = 1.0;
  const auto clipped = mc_dos(ModelParams::with_dims(0, {}, 6, 9, 1.0, 0.0), opt);
  CHECK(clipped.overflow_count > 0);
  std::uint64_t in2 = 0;
  for (auto c : clipped.counts) in2 += c;
  CHECK(in2 + clipped.zero_mode_count + clipped.overflow_count == clipped.total_eigenvalues);
}

TEST_CASE("mc_dos is deterministic in the seed and independent of threads") {
  const auto params = ModelParams::with_dims(1, {5}, 2, 3, 0.6, 1.0);
  McOptions opt;
  opt.samples = 24;
  opt.bins = 16;
  opt.seed = 99;
  opt.exec = Execution::kSerial;
  const auto ref = mc_dos(params, opt);
  opt.exec = Execution::kParallel;
  const int original = max_threads();
  for (int t : {1, 2, 4}) {
    set_threads(t);
    const auto h = mc_dos(params, opt);
    CHECK(h.counts == ref.counts);
    CHECK(h.bin_edges == ref.bin_edges);
    CHECK(h.zero_mode_count == ref.zero_mode_count);
  }
  set_threads(original);
  opt.seed = 100;
  CHECK(mc_dos(params, opt).bin_edges != ref.bin_edges);
}

TEST_CASE("random-matrix a = 2 histogram is empty inside the gap") {
  const auto edge = rmt_gap_edge(2.0, 1.0, 1e-9);
  REQUIRE(edge.has_value());
  McOptions opt;
  opt.samples = 200;
  opt.bins = 100;
  opt.omega_max = 3.0;
  const auto h = mc_dos(ModelParams::with_dims(0, {}, 64, 256, 1.0, 0.0), opt);
  for (std::size_t i = 0; i < h.bins(); ++i)
    if (h.bin_edges[i + 1] <= 0.8 * *edge) CHECK(h.density(i) <= 0.01);
}

TEST_CASE("weak disorder histogram approaches the clean dispersion") {
  const int L = 16;
  const auto params = ModelParams::with_dims(1, {L}, 2, 4, 1e-8, 1.0);
  McOptions opt;
  opt.samples = 4;
  opt.bins = 7;
  opt.omega_max = 1.5;
  const auto h = mc_dos(params, opt);
  std::vector<std::uint64_t> expect(7, 0);
  for (int m = 0; m < L; ++m) {
    const double e = dispersion(Wavevector{2 * pi * m / L}, 1.0);
    const auto bin = static_cast<std::size_t>(e / 1.5 * 7);
    expect[std::min<std::size_t>(bin, 6)] += 2 * 2 * opt.samples;  // +-, two bands
  }
  for (std::size_t i = 1; i < 7; ++i) CHECK(h.counts[i] == expect[i]);
}

TEST_CASE("MC histogram approaches the CPA density as N grows") {
  double prev = 1e300;
  for (int N : {8, 16, 32}) {
    McOptions opt;
    opt.samples = 500;
    opt.bins = 100;
    opt.omega_max = 1.5 * std::sqrt(3.0);
    const auto h = mc_dos(ModelParams::with_dims(0, {}, N, 2 * N, 1.0, 0.0), opt);
    std::vector<double> grid;
    for (int i = 1; i <= 2000; ++i) grid.push_back(opt.omega_max * i / 2000.0);
    const auto cpa = rmt_dos_curve(grid, 1e-6, 1.0, 1.0);
    const double l1 = compare_curves(cpa, h).l1;
    MESSAGE("N = " << N << ": L1 = " << l1);
    CHECK(l1 < prev);
    prev = l1;
  }
}
