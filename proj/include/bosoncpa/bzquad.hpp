#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>

#include "bosoncpa/model.hpp"
#include "bosoncpa/parallel.hpp"

namespace bosoncpa {

/// How the CPA kernels are integrated over the zone.
enum class QuadratureRule {
  /// Tensor-product periodic rectangle rule on every axis. Spectrally
  /// accurate while Re z is not small compared with the band width.
  kUniform,
  /// Uniform rule on the leading d-1 axes; the last axis is integrated in
  /// closed form. Exact in d = 1 and insensitive to small Re z.
  kAnalyticLastAxis,
};

std::string to_string(QuadratureRule rule);
QuadratureRule quadrature_rule_from_string(const std::string& s);

struct QuadratureSpec {
  int points_per_dim = 4096;
  bool convergence_check = false;
  double rel_tol = 1e-9;
  QuadratureRule rule = QuadratureRule::kAnalyticLastAxis;

  void validate() const;
  /// 4096 (d=1), 256 (d=2), 64 (d=3), 16 beyond.
  static QuadratureSpec defaults_for(int d);
};

struct KernelParams {
  Complex z;
  Complex p;
  double nu = 1.0;
};

/// z^2 + p^2 + p nu (2 - Delta_k) + nu^2 (1 - Delta_k).
Complex kernel_D(const Wavevector& k, const KernelParams& kp);
Complex kernel_D(double delta, const KernelParams& kp);

struct QuadResult {
  Complex value;
  bool checked = false;          // doubling comparison was performed
  double doubling_rel_diff = 0;  // |I(2n) - I(n)| / |I(2n)|
  std::string warning;           // non-empty when the doubling check failed
};

using BzIntegrand = std::function<Complex(std::span<const double>)>;

/// Normalized integral (2 pi)^-d int_[0,2pi]^d f(k) d^dk on the uniform
/// periodic grid. A non-finite sample raises NumericalError naming the grid
/// point. With spec.convergence_check the doubled grid is compared against
/// spec.rel_tol. spec.rule is ignored: this is always the uniform rule.
QuadResult integrate_bz(const BzIntegrand& f, int d, const QuadratureSpec& spec,
                        Execution exec = Execution::kParallel);

/// The three zone averages the CPA needs at one (z, p):
///   inv_d = <1/D>, num = <Nk/D>, dnum = <1/D - 2 Nk^2/D^2> = d num / d p
/// with Nk = p + nu (1 - Delta_k / 2).
struct KernelMoments {
  Complex inv_d;
  Complex num;
  Complex dnum;
  KernelMoments operator+(const KernelMoments& o) const {
    return {inv_d + o.inv_d, num + o.num, dnum + o.dnum};
  }
};

struct KernelIntegrals {
  KernelMoments moments;
  bool checked = false;
  double doubling_rel_diff = 0;
  std::string warning;
};

KernelIntegrals kernel_integrals(const KernelParams& kp, int d,
                                 const QuadratureSpec& spec,
                                 Execution exec = Execution::kParallel);

/// z <1/D>: the average resolvent at coherent potential p.
QuadResult I_g(const KernelParams& kp, int d, const QuadratureSpec& spec,
               Execution exec = Execution::kParallel);

/// <(p + nu (1 - Delta_k/2)) / D>: the zone integral of the self-consistency
/// equation.
QuadResult I_cpa(const KernelParams& kp, int d, const QuadratureSpec& spec,
                 Execution exec = Execution::kParallel);

namespace detail {

/// Closed-form averages over k in [0, 2pi) of cos^m k / (A - B cos k)^j for
/// m = 0..2, j = 1..2. Requires A - B cos k != 0 on the circle.
struct CosineMoments {
  Complex i0, i1, i2;  // j = 1
  Complex k0, k1, k2;  // j = 2
};
CosineMoments cosine_moments(Complex A, Complex B);

}  // namespace detail

}  // namespace bosoncpa
