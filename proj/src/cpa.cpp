#include "bosoncpa/cpa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bosoncpa/errors.hpp"

namespace bosoncpa {
namespace {

struct Evaluation {
  Complex residual;
  double relative;
  KernelMoments moments;
};

Evaluation evaluate(Complex p, Complex z, const ModelParams& params,
                    const QuadratureSpec& spec, Execution exec) {
  QuadratureSpec quiet = spec;
  quiet.convergence_check = false;
  const KernelParams kp{z, p, params.nu};
  const KernelMoments m = kernel_integrals(kp, params.d, quiet, exec).moments;
  const double inv_b = 1.0 / params.b;
  const Complex a_over_p = params.a / p;
  const Complex r = inv_b - a_over_p + m.num;
  const double scale = std::max({inv_b, std::abs(a_over_p), std::abs(m.num)});
  return {r, std::abs(r) / scale, m};
}

std::string format_complex(Complex c) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << c.real() << "," << c.imag() << ")";
  return os.str();
}

bool is_finite(Complex c) {
  return std::isfinite(c.real()) && std::isfinite(c.imag());
}

double z_start(const ModelParams& params, const SolverConfig& cfg) {
  return cfg.z_start_factor * std::max(params.b, params.nu);
}

CoherentPotential pure_solution(Complex z, const ModelParams& params,
                                const QuadratureSpec& spec, Execution exec) {
  CoherentPotential cp;
  cp.z = z;
  cp.p = 0.0;
  const KernelIntegrals k = kernel_integrals({z, 0.0, params.nu}, params.d, spec, exec);
  cp.g = z * k.moments.inv_d;
  cp.branch_tag = "pure system (b = 0)";
  if (!k.warning.empty()) cp.warnings.push_back(k.warning);
  return cp;
}

// Moves the solution from (z_from, p_from) to z_to along a straight segment,
// halving the step whenever Newton fails or p jumps by more than jump_tol.
CoherentPotential track(Complex z_from, Complex p_from, Complex z_to,
                        const ModelParams& params, const QuadratureSpec& spec,
                        const SolverConfig& cfg) {
  const double min_step = std::ldexp(1.0, -cfg.max_refinements);
  double t = 0.0;
  double h = 1.0;
  Complex p = p_from;
  CoherentPotential last;
  bool have_last = false;
  int refinements = 0;
  bool flagged = false;
  std::string diagnostic;

  while (t < 1.0) {
    h = std::min(h, 1.0 - t);
    const double t_next = (1.0 - t - h < 1e-15) ? 1.0 : t + h;
    const Complex z = z_from + (z_to - z_from) * t_next;
    const double jump_scale = std::max(std::abs(p), 1e-3 * params.b);
    bool solved = false;
    bool ok = false;
    CoherentPotential cp;
    std::string failure;
    try {
      cp = solve_p(z, params, spec, cfg, p);
      solved = true;
      ok = std::abs(cp.p - p) <= cfg.jump_tol * jump_scale;
      if (!ok) failure = "branch jump |dp| = " + std::to_string(std::abs(cp.p - p));
    } catch (const NumericalError& e) {
      failure = e.what();
    }
    if (ok || h <= min_step) {
      if (!ok) {
        flagged = true;
        diagnostic = "continuation refinement exhausted near z = " +
                     format_complex(z) + ": " + failure;
        if (!solved) {
          // Newton itself failed: carry the last good value forward.
          if (have_last) cp = last;
          cp.p = p;
          cp.z = z;
          cp.residual = std::numeric_limits<double>::infinity();
        }
      }
      t = t_next;
      p = cp.p;
      last = cp;
      have_last = true;
      h = std::min(1.0, 2.0 * h);
    } else {
      h *= 0.5;
      ++refinements;
    }
  }
  last.flagged = last.flagged || flagged;
  if (flagged) last.warnings.push_back(diagnostic);
  if (refinements > 0)
    last.branch_tag += "; path refinements=" + std::to_string(refinements);
  return last;
}

CoherentPotential reach(Complex z, const ModelParams& params,
                        const QuadratureSpec& spec, const SolverConfig& cfg) {
  const double z0 = z_start(params, cfg);
  const Complex seed = params.a * params.b;
  CoherentPotential cp = solve_p(z0, params, spec, cfg, seed);
  const Complex corner(z0, z.imag());
  cp = track(z0, cp.p, corner, params, spec, cfg);
  cp = track(corner, cp.p, z, params, spec, cfg);
  cp.branch_tag = "continued from z=" + format_complex(z0) + " via " +
                  format_complex(corner) + "; " + cp.branch_tag;
  return cp;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(newton_tol > 0.0)) throw ArgumentError("newton_tol must be > 0");
  if (max_iter < 1) throw ArgumentError("max_iter must be >= 1");
  if (!(damping > 0.0 && damping < 1.0))
    throw ArgumentError("damping must lie in (0, 1)");
  if (z_start_factor < 10.0)
    throw ArgumentError("continuation must start at Re z >= 10 max(b, nu)");
  if (!(jump_tol > 0.0)) throw ArgumentError("jump_tol must be > 0");
}

double DosCurve::total_mass() const {
  double s = 0.0;
  for (std::size_t i = 1; i < omegas.size(); ++i)
    s += 0.5 * (rho[i] + rho[i - 1]) * (omegas[i] - omegas[i - 1]);
  return 2.0 * s + dirac_mass_at_zero;
}

double dirac_tail(double mass, Complex z) {
  return mass > 0.0 ? (mass / z).real() / std::numbers::pi : 0.0;
}

double default_eps(const ModelParams& params) {
  return params.random_matrix_limit() ? 1e-3 * params.b : 1e-3 * params.nu;
}

Complex cpa_residual(Complex p, Complex z, const ModelParams& params,
                     const QuadratureSpec& spec, Execution exec) {
  params.validate();
  if (p == Complex(0.0)) throw ArgumentError("cpa_residual is singular at p = 0");
  if (params.b == 0.0)
    throw ArgumentError("b = 0 has no self-consistency equation (p = 0)");
  return evaluate(p, z, params, spec, exec).residual;
}

CoherentPotential solve_p(Complex z, const ModelParams& params,
                          const QuadratureSpec& spec, const SolverConfig& cfg,
                          std::optional<Complex> seed_p) {
  params.validate();
  cfg.validate();
  if (!(z.real() > 0.0)) throw ArgumentError("solve_p requires Re z > 0");
  if (params.b == 0.0) return pure_solution(z, params, spec, cfg.exec);

  Complex p = seed_p.value_or(Complex(params.a * params.b, 0.0));
  if (!(p.real() > 0.0)) throw ArgumentError("seed must satisfy Re p > 0");

  CoherentPotential cp;
  cp.z = z;
  cp.branch_tag = "seed=" + format_complex(p);
  Evaluation ev = evaluate(p, z, params, spec, cfg.exec);
  int it = 0;
  for (; it < cfg.max_iter && !(ev.relative <= cfg.newton_tol); ++it) {
    const Complex deriv = params.a / (p * p) + ev.moments.dnum;
    const Complex step = ev.residual / deriv;
    if (!is_finite(step)) throw SolverError("Newton step is not finite", p);
    double lambda = 1.0;
    bool accepted = false;
    bool sign_ok_seen = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, lambda *= cfg.damping) {
      const Complex trial = p - lambda * step;
      if (!(trial.real() > 0.0)) continue;
      sign_ok_seen = true;
      Evaluation trial_ev;
      try {
        trial_ev = evaluate(trial, z, params, spec, cfg.exec);
      } catch (const NumericalError&) {
        continue;
      }
      if (trial_ev.relative < ev.relative || h == cfg.max_halvings) {
        p = trial;
        ev = trial_ev;
        accepted = true;
        break;
      }
    }
    if (!sign_ok_seen)
      throw BranchError("Newton iterate lost Re p > 0 at z = " + format_complex(z));
    if (!accepted) throw SolverError("damped Newton step was rejected", p);
  }
  if (!(ev.relative <= cfg.newton_tol)) {
    std::ostringstream os;
    os << "Newton did not converge at z = " << format_complex(z) << " after "
       << it << " iterations (relative residual " << ev.relative << ")";
    throw SolverError(os.str(), p);
  }
  cp.p = p;
  cp.g = z * ev.moments.inv_d;
  cp.residual = ev.relative;
  cp.residual_abs = std::abs(ev.residual);
  cp.iterations = it;
  if (spec.convergence_check) {
    const KernelIntegrals k =
        kernel_integrals({z, p, params.nu}, params.d, spec, cfg.exec);
    if (!k.warning.empty()) cp.warnings.push_back(k.warning);
  }
  return cp;
}

std::vector<CoherentPotential> continuation_sweep(
    std::span<const double> omega_grid, double eps, const ModelParams& params,
    const QuadratureSpec& spec, const SolverConfig& cfg) {
  params.validate();
  cfg.validate();
  if (!(eps > 0.0)) throw ArgumentError("eps must be > 0");
  for (std::size_t i = 1; i < omega_grid.size(); ++i)
    if (!(omega_grid[i] > omega_grid[i - 1]))
      throw ArgumentError("omega grid must be strictly ascending");

  const std::size_t n = omega_grid.size();
  std::vector<CoherentPotential> out(n);
  if (n == 0) return out;
  if (params.b == 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = pure_solution({eps, omega_grid[i]}, params, spec, cfg.exec);
    return out;
  }

  const bool ascending = cfg.direction == SweepDirection::kAscending;
  auto order = [&](std::size_t j) { return ascending ? j : n - 1 - j; };

  const std::size_t first = order(0);
  CoherentPotential cp = reach({eps, omega_grid[first]}, params, spec, cfg);
  out[first] = cp;
  for (std::size_t j = 1; j < n; ++j) {
    const std::size_t i = order(j);
    const std::size_t prev = order(j - 1);
    CoherentPotential next =
        track({eps, omega_grid[prev]}, out[prev].p, {eps, omega_grid[i]}, params,
              spec, cfg);
    next.branch_tag = "swept from omega=" + std::to_string(omega_grid[prev]) +
                      "; " + next.branch_tag;
    out[i] = std::move(next);
  }
  return out;
}

CoherentPotential resolve(Complex z, const ModelParams& params,
                          const QuadratureSpec& spec, const SolverConfig& cfg) {
  params.validate();
  cfg.validate();
  if (!(z.real() > 0.0)) throw ArgumentError("resolve requires Re z > 0");
  if (params.b == 0.0) return pure_solution(z, params, spec, cfg.exec);
  return reach(z, params, spec, cfg);
}

Complex g_of_z(Complex z, const ModelParams& params, const QuadratureSpec& spec,
               const SolverConfig& cfg) {
  if (z.real() == 0.0) throw ArgumentError("g(z) is evaluated off the imaginary axis only");
  if (z.real() < 0.0) return -g_of_z(-z, params, spec, cfg);
  return resolve(z, params, spec, cfg).g;
}

DosCurve dos_curve(std::span<const double> omega_grid, double eps,
                   const ModelParams& params, const QuadratureSpec& spec,
                   const SolverConfig& cfg) {
  for (double w : omega_grid)
    if (!(w > 0.0)) throw ArgumentError("omega grid must be positive");
  const auto sweep = continuation_sweep(omega_grid, eps, params, spec, cfg);

  DosCurve curve;
  curve.omegas.assign(omega_grid.begin(), omega_grid.end());
  curve.eps = eps;
  curve.params = params;
  curve.quad = spec;
  curve.dirac_mass_at_zero =
      params.random_matrix_limit() ? std::max(0.0, 1.0 - params.a) : 0.0;
  curve.rho.reserve(sweep.size());
  const double mass = curve.dirac_mass_at_zero;
  for (const auto& cp : sweep) {
    const double rho = cp.g.real() / std::numbers::pi - dirac_tail(mass, cp.z);
    if (rho < -1e-6) {
      std::ostringstream os;
      os << "negative density " << rho << " at omega = " << cp.z.imag()
         << " (coherent potential left the physical branch)";
      throw BranchError(os.str());
    }
    curve.rho.push_back(rho);
    curve.p.push_back(cp.p);
    curve.residual.push_back(cp.residual);
    for (const auto& w : cp.warnings) curve.warnings.push_back(w);
    if (cp.flagged)
      curve.warnings.push_back("flagged continuation point at omega = " +
                               std::to_string(cp.z.imag()));
  }
  return curve;
}

DosCurve dos_curve_extrapolated(std::span<const double> omega_grid, double eps,
                                const ModelParams& params,
                                const QuadratureSpec& spec,
                                const SolverConfig& cfg) {
  DosCurve coarse = dos_curve(omega_grid, eps, params, spec, cfg);
  const DosCurve fine = dos_curve(omega_grid, 0.5 * eps, params, spec, cfg);
  for (std::size_t i = 0; i < coarse.rho.size(); ++i)
    coarse.rho[i] = 2.0 * fine.rho[i] - coarse.rho[i];
  coarse.p = fine.p;
  coarse.residual = fine.residual;
  coarse.warnings.insert(coarse.warnings.end(), fine.warnings.begin(),
                         fine.warnings.end());
  coarse.warnings.push_back("rho Richardson-extrapolated from eps and eps/2");
  return coarse;
}

std::optional<double> locate_gap_edge(const DosCurve& curve,
                                      const std::function<double(double)>& rho_at,
                                      double threshold, double tol) {
  const auto& w = curve.omegas;
  std::size_t i = 0;
  while (i < w.size() && curve.rho[i] <= threshold) ++i;
  if (i == 0 || i == w.size()) return std::nullopt;
  double lo = w[i - 1];
  double hi = w[i];
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (rho_at(mid) <= threshold) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace bosoncpa
