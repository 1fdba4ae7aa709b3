#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bosoncpa {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using SparseComplexMatrix = Eigen::SparseMatrix<Complex>;

/// Parameter set shared by the CPA equations and the sampled ensemble.
///
/// All energies are angular frequencies (hbar = 1). `a` is the ratio
/// M/(2N); when both `bands` (N) and `aux_dim` (M) are present it must equal
/// that ratio exactly. CPA-only runs leave N and M unset. `d == 0` denotes a
/// single site without deterministic coupling and requires nu == 0.
struct ModelParams {
  int d = 1;
  std::vector<int> extents;    // sites per axis, periodic; empty => CPA only
  std::optional<int> bands;    // N
  std::optional<int> aux_dim;  // M
  double a = 1.0;
  double b = 1.0;
  double nu = 1.0;

  /// Builds a parameter set from explicit (N, M); a is derived.
  static ModelParams with_dims(int d, std::vector<int> extents, int bands,
                               int aux_dim, double b, double nu);

  /// Throws ArgumentError when an invariant is violated.
  void validate() const;
  /// validate() plus the extra requirements of the Monte Carlo sampler.
  void validate_for_sampling() const;
  /// Non-fatal remarks (e.g. M = 1).
  std::vector<std::string> sampling_warnings() const;

  std::size_t site_count() const;
  bool random_matrix_limit() const { return nu == 0.0; }
  std::string describe() const;
};

/// Point of the Brillouin zone [0, 2pi)^d. Components are wrapped into the
/// fundamental cell on construction.
class Wavevector {
 public:
  Wavevector() = default;
  explicit Wavevector(std::vector<double> k);
  Wavevector(std::initializer_list<double> k)
      : Wavevector(std::vector<double>(k)) {}

  std::size_t dim() const { return k_.size(); }
  std::span<const double> components() const { return k_; }
  double operator[](std::size_t i) const { return k_[i]; }

 private:
  std::vector<double> k_;
};

/// Periodic hypercubic lattice with site coordinates stored row-major
/// (last axis fastest).
class Lattice {
 public:
  explicit Lattice(std::vector<int> extents);

  int dim() const { return static_cast<int>(extents_.size()); }
  std::size_t size() const { return size_; }
  std::span<const int> extents() const { return extents_; }

  std::vector<int> coords(std::size_t site) const;
  std::size_t index(std::span<const int> coords) const;
  /// Site reached from `site` by one step of `sign` (+1/-1) along `axis`.
  std::size_t neighbor(std::size_t site, int axis, int sign) const;

 private:
  std::vector<int> extents_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

/// Scaled Laplacian symbol (1/d) sum_i cos(k_i).
double delta_k(const Wavevector& k, int d);

/// Single-boson frequency nu * sqrt(1 - Delta_k).
double dispersion(const Wavevector& k, double nu);

/// Momentum-space generator -(i nu/2) [[2-D, -D], [D, -2+D]], D = Delta_k.
/// Eigenvalues are +-i * dispersion(k).
Eigen::Matrix2cd k1_block(const Wavevector& k, double nu);

/// Real-space deterministic generator K = K1 (x) Id_N on the periodic lattice
/// described by params.extents. Basis ordering is site-major: index
/// site * 2N + c * N + n with c = 0 (annihilation) / 1 (creation).
SparseComplexMatrix assemble_K(const ModelParams& params);

/// Dense index of (site, component, band) in the site-major basis.
inline std::size_t basis_index(std::size_t site, int component, int band,
                               int bands) {
  return site * 2 * static_cast<std::size_t>(bands) +
         static_cast<std::size_t>(component * bands + band);
}

}  // namespace bosoncpa
