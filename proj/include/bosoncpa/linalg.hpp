#pragma once

#include <Eigen/Dense>

#include <optional>

#include "bosoncpa/model.hpp"

namespace bosoncpa {

/// Dense Hermitian matrix. Construction checks A = A^dagger to a relative
/// tolerance and stores the exactly symmetrized matrix.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(ComplexMatrix m, double rel_tol = 1e-12);

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  /// Max absolute row sum; bounds the spectral norm.
  double norm() const { return norm_; }

 private:
  ComplexMatrix m_;
  double norm_ = 0.0;
};

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  std::optional<ComplexMatrix> eigenvectors;
};

EigenDecomposition hermitian_eig(const HermitianMatrix& a,
                                 bool with_vectors = false);

struct CholeskyFactor {
  ComplexMatrix lower;  // A + shift * I = lower * lower^dagger
  double shift = 0.0;
};

/// Cholesky factor of a positive semidefinite matrix. If the plain
/// factorization fails, the smallest diagonal shift from the ladder
/// 1e-16 ||A||, 1e-15 ||A||, ... capped at shift_tol ||A|| is used.
/// Throws ConeViolation when even the capped shift fails.
CholeskyFactor cholesky_psd(const HermitianMatrix& a, double shift_tol);

/// Hermitian square root S = V sqrt(max(L, 0)) V^dagger. Eigenvalues below
/// -shift_tol ||A|| raise ConeViolation; smaller negative ones are clipped.
HermitianMatrix psd_sqrt(const HermitianMatrix& a, double shift_tol = 1e-10);

}  // namespace bosoncpa
