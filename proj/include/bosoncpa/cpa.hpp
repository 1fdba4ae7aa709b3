#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bosoncpa/bzquad.hpp"
#include "bosoncpa/model.hpp"

namespace bosoncpa {

enum class SweepDirection { kAscending, kDescending };

struct SolverConfig {
  double newton_tol = 1e-12;  // on the relative residual, see CoherentPotential
  int max_iter = 100;
  double damping = 0.5;       // step factor applied per halving
  int max_halvings = 40;
  double z_start_factor = 10.0;  // continuation starts at z = factor * max(b, nu)
  double jump_tol = 0.25;        // |dp| / max(|p|, 1e-3 b) that forces refinement
  int max_refinements = 24;      // path step halvings before a point is flagged
  SweepDirection direction = SweepDirection::kAscending;
  Execution exec = Execution::kParallel;

  void validate() const;
};

/// Solution p(z) of the self-consistency equation.
///
/// `residual` is |1/b - a/p + I_cpa| divided by the largest of the three
/// magnitudes, so the tolerance means the same thing at b = 1e-8 and b = 1.
struct CoherentPotential {
  Complex p;
  Complex z;
  Complex g;                 // z <1/D> at this p
  double residual = 0.0;
  double residual_abs = 0.0;
  int iterations = 0;
  std::string branch_tag;
  bool flagged = false;      // continuation could not certify the branch here
  std::vector<std::string> warnings;
};

/// Sampled density of eigenfrequencies, two-sided convention:
/// 2 * int_0^inf rho + dirac_mass_at_zero = 1.
struct DosCurve {
  std::vector<double> omegas;
  std::vector<double> rho;
  std::vector<Complex> p;
  std::vector<double> residual;
  double dirac_mass_at_zero = 0.0;
  double eps = 0.0;
  ModelParams params;
  QuadratureSpec quad;
  std::vector<std::string> warnings;

  /// 2 * trapezoid(rho) + dirac_mass_at_zero.
  double total_mass() const;
};

double default_eps(const ModelParams& params);

/// Contribution of a zero-frequency mass to Re g(z) / pi at finite Re z,
/// mass * Re(1/z) / pi. dos_curve removes it from rho so that the mass is
/// reported only in dirac_mass_at_zero.
double dirac_tail(double mass, Complex z);

/// 1/b - a/p + I_cpa(z, p).
Complex cpa_residual(Complex p, Complex z, const ModelParams& params,
                     const QuadratureSpec& spec,
                     Execution exec = Execution::kParallel);

/// Damped Newton iteration on cpa_residual from seed_p (default a*b).
/// For b = 0 returns p = 0 without iterating.
CoherentPotential solve_p(Complex z, const ModelParams& params,
                          const QuadratureSpec& spec, const SolverConfig& cfg,
                          std::optional<Complex> seed_p = std::nullopt);

/// Physical-branch solutions at z = eps + i omega for every omega, reached by
/// continuation from large real z. Results are in the order of omega_grid.
std::vector<CoherentPotential> continuation_sweep(
    std::span<const double> omega_grid, double eps, const ModelParams& params,
    const QuadratureSpec& spec, const SolverConfig& cfg);

/// Physical-branch solution at a single z (Re z > 0) by continuation.
CoherentPotential resolve(Complex z, const ModelParams& params,
                          const QuadratureSpec& spec, const SolverConfig& cfg);

/// Average resolvent g(z). Re z < 0 is mapped through g(-z) = -g(z).
Complex g_of_z(Complex z, const ModelParams& params, const QuadratureSpec& spec,
               const SolverConfig& cfg);

/// rho(omega) = Re g(eps + i omega) / pi along a continuation sweep, minus
/// dirac_tail in the random-matrix limit with a < 1.
DosCurve dos_curve(std::span<const double> omega_grid, double eps,
                   const ModelParams& params, const QuadratureSpec& spec,
                   const SolverConfig& cfg);

/// Richardson combination 2 rho(eps/2) - rho(eps).
DosCurve dos_curve_extrapolated(std::span<const double> omega_grid, double eps,
                                const ModelParams& params,
                                const QuadratureSpec& spec,
                                const SolverConfig& cfg);

/// Upper end of the low-frequency interval where rho <= threshold. The first
/// grid point above threshold brackets the edge, which is then refined by
/// bisection on rho_at. Empty when rho exceeds threshold at the first point.
std::optional<double> locate_gap_edge(const DosCurve& curve,
                                      const std::function<double(double)>& rho_at,
                                      double threshold = 1e-6,
                                      double tol = 1e-10);

// ---------------------------------------------------------------------------
// Random-matrix limit (nu = 0): the self-consistency equation clears to the
// cubic p^3 + (1 - a) b p^2 + z^2 p - a b z^2 = 0.

/// All three roots of the random-matrix cubic at z.
std::vector<Complex> rmt_cubic_roots(Complex z, double a, double b);

/// The root with Re p > 0 and Re g > 0 (unique for Re z > 0).
Complex rmt_solve_p(Complex z, double a, double b);

Complex rmt_g(Complex z, double a, double b);

/// Density curve from the cubic. dirac_mass_at_zero = max(0, 1 - a).
DosCurve rmt_dos_curve(std::span<const double> omega_grid, double eps, double a,
                       double b);

/// Gap edge of the random-matrix density (a > 1) by bisection.
std::optional<double> rmt_gap_edge(double a, double b, double eps,
                                   double threshold = 1e-6);

struct ScaledDensityPoint {
  double x;
  Complex gtilde;  // root of gtilde^3 - gtilde + 1/x = 0
  double density;  // Im gtilde / pi; rho(omega) = density(omega/b) / b
};

/// a = 1 random-matrix density in scaled variables x = omega / b,
/// gtilde(x) = i b g(i b x).
std::vector<ScaledDensityPoint> rmt_scaled_a1(std::span<const double> x_grid);

}  // namespace bosoncpa
