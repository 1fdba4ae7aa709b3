#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bosoncpa {

/// Bad input: dimension mismatch, out-of-range parameter, malformed flag.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Any failure of a numerical kernel (non-finite integrand, eigensolver
/// breakdown). Subclasses narrow the cause.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton iteration did not reach tolerance; carries the last iterate.
class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, std::complex<double> last_p)
      : NumericalError(what), last_p_(last_p) {}
  std::complex<double> last_p() const { return last_p_; }

 private:
  std::complex<double> last_p_;
};

/// The coherent potential left the physical branch (Re p <= 0, negative
/// density, or no admissible root).
class BranchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A sampled generator is outside the positive cone (i Sigma3 X not PSD).
class ConeViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bosoncpa
