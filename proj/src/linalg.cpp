#include "bosoncpa/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bosoncpa/errors.hpp"

namespace bosoncpa {

HermitianMatrix::HermitianMatrix(ComplexMatrix m, double rel_tol) {
  if (m.rows() != m.cols()) throw ArgumentError("Hermitian matrix must be square");
  const double scale = m.cwiseAbs().maxCoeff();
  if (m.size() > 0) {
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (!std::isfinite(scale) || asym > rel_tol * std::max(scale, 1e-300)) {
      std::ostringstream os;
      os << "matrix is not Hermitian (|A - A^dagger|_max = " << asym
         << ", |A|_max = " << scale << ")";
      throw ArgumentError(os.str());
    }
  }
  m_ = 0.5 * (m + m.adjoint());
  norm_ = m_.size() > 0 ? m_.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
}

EigenDecomposition hermitian_eig(const HermitianMatrix& a, bool with_vectors) {
  EigenDecomposition out;
  if (a.dim() == 0) {
    out.eigenvalues.resize(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      a.matrix(), with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Hermitian eigensolver did not converge (n = " << a.dim()
       << ", Eigen info = " << static_cast<int>(es.info()) << ")";
    throw NumericalError(os.str());
  }
  out.eigenvalues = es.eigenvalues();
  if (with_vectors) out.eigenvectors = es.eigenvectors();
  return out;
}

CholeskyFactor cholesky_psd(const HermitianMatrix& a, double shift_tol) {
  if (!(shift_tol >= 0.0)) throw ArgumentError("shift_tol must be >= 0");
  const ComplexMatrix& m = a.matrix();
  const auto n = m.rows();
  const double norm = a.norm();
  const double cap = shift_tol * norm;

  auto attempt = [&](double sigma, CholeskyFactor& out) {
    Eigen::LLT<ComplexMatrix> llt;
    if (sigma == 0.0) {
      llt.compute(m);
    } else {
      llt.compute(m + sigma * ComplexMatrix::Identity(n, n));
    }
    if (llt.info() != Eigen::Success) return false;
    out.lower = llt.matrixL();
    out.shift = sigma;
    return true;
  };

  CholeskyFactor f;
  if (attempt(0.0, f)) return f;
  for (double rel = 1e-16; rel * norm < cap; rel *= 10.0)
    if (attempt(rel * norm, f)) return f;
  if (cap > 0.0 && attempt(cap, f)) return f;

  std::ostringstream os;
  os << "matrix is not positive semidefinite within shift "
     << shift_tol << " * ||A|| (||A|| = " << norm << ")";
  throw ConeViolation(os.str());
}

HermitianMatrix psd_sqrt(const HermitianMatrix& a, double shift_tol) {
  const auto eig = hermitian_eig(a, true);
  const double floor = -shift_tol * a.norm();
  Eigen::VectorXd root(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < root.size(); ++i) {
    const double l = eig.eigenvalues(i);
    if (l < floor) {
      std::ostringstream os;
      os << "psd_sqrt: eigenvalue " << l << " below " << floor;
      throw ConeViolation(os.str());
    }
    root(i) = std::sqrt(std::max(l, 0.0));
  }
  const ComplexMatrix& v = *eig.eigenvectors;
  return HermitianMatrix(v * root.cast<Complex>().asDiagonal() * v.adjoint(), 1e-10);
}

}  // namespace bosoncpa
