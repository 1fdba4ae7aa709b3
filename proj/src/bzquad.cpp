#include "bosoncpa/bzquad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bosoncpa/errors.hpp"

namespace bosoncpa {
namespace {

constexpr int kMaxDim = 8;
constexpr double kMaxGridPoints = 1e10;

std::vector<double> cos_table(int n) {
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    c[static_cast<std::size_t>(i)] = std::cos(2.0 * std::numbers::pi * i / n);
  return c;
}

std::size_t grid_size(int n, int axes) {
  if (std::pow(static_cast<double>(n), axes) > kMaxGridPoints)
    throw ArgumentError("quadrature grid too large");
  std::size_t total = 1;
  for (int i = 0; i < axes; ++i) total *= static_cast<std::size_t>(n);
  return total;
}

// Decodes a linear grid index (last axis fastest) into per-axis indices.
void decode(std::size_t idx, int n, int axes, std::array<int, kMaxDim>& out) {
  for (int a = axes - 1; a >= 0; --a) {
    out[static_cast<std::size_t>(a)] = static_cast<int>(idx % static_cast<std::size_t>(n));
    idx /= static_cast<std::size_t>(n);
  }
}

[[noreturn]] void throw_nonfinite(std::size_t idx, int n, int axes) {
  std::array<int, kMaxDim> ii{};
  decode(idx, n, axes, ii);
  std::ostringstream os;
  os << "non-finite integrand at grid point (";
  for (int a = 0; a < axes; ++a)
    os << (a ? ", " : "") << "2pi*" << ii[static_cast<std::size_t>(a)] << "/" << n;
  os << ")";
  throw NumericalError(os.str());
}

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

double rel_diff(Complex coarse, Complex fine) {
  const double scale = std::abs(fine);
  const double diff = std::abs(fine - coarse);
  return scale > 0.0 ? diff / scale : diff;
}

std::string doubling_warning(double diff, double tol, int n) {
  std::ostringstream os;
  os.precision(3);
  os << "quadrature doubling check failed: rel diff " << diff << " > " << tol
     << " at points_per_dim=" << n;
  return os.str();
}

void check_dim(int d) {
  if (d < 0 || d > kMaxDim) throw ArgumentError("dimension must be in [0, 8]");
}

Complex uniform_integral(const BzIntegrand& f, int d, int n, Execution exec) {
  if (d == 0) {
    const Complex v = f({});
    if (!finite(v)) throw NumericalError("non-finite integrand at k = ()");
    return v;
  }
  const std::size_t total = grid_size(n, d);
  const double h = 2.0 * std::numbers::pi / n;
  const Complex sum = deterministic_sum<Complex>(
      total,
      [&](std::size_t idx) {
        std::array<int, kMaxDim> ii{};
        std::array<double, kMaxDim> k{};
        decode(idx, n, d, ii);
        for (int a = 0; a < d; ++a)
          k[static_cast<std::size_t>(a)] = h * ii[static_cast<std::size_t>(a)];
        const Complex v = f(std::span<const double>(k.data(), static_cast<std::size_t>(d)));
        if (!finite(v)) throw_nonfinite(idx, n, d);
        return v;
      },
      exec);
  return sum / static_cast<double>(total);
}

KernelMoments moments_uniform(const KernelParams& kp, int d, int n,
                              Execution exec) {
  const Complex p = kp.p;
  const double nu = kp.nu;
  auto at_delta = [&](double delta) {
    const Complex dk = kernel_D(delta, kp);
    const Complex nk = p + nu * (1.0 - 0.5 * delta);
    const Complex inv = 1.0 / dk;
    const Complex ratio = nk * inv;
    return KernelMoments{inv, ratio, inv - 2.0 * ratio * ratio};
  };
  if (d == 0) return at_delta(0.0);

  const auto table = cos_table(n);
  const std::size_t total = grid_size(n, d);
  const KernelMoments sum = deterministic_sum<KernelMoments>(
      total,
      [&](std::size_t idx) {
        std::array<int, kMaxDim> ii{};
        decode(idx, n, d, ii);
        double s = 0.0;
        for (int a = 0; a < d; ++a)
          s += table[static_cast<std::size_t>(ii[static_cast<std::size_t>(a)])];
        const KernelMoments m = at_delta(s / d);
        if (!finite(m.inv_d) || !finite(m.num) || !finite(m.dnum))
          throw_nonfinite(idx, n, d);
        return m;
      },
      exec);
  const double w = 1.0 / static_cast<double>(total);
  return {sum.inv_d * w, sum.num * w, sum.dnum * w};
}

KernelMoments moments_analytic(const KernelParams& kp, int d, int n,
                               Execution exec) {
  const Complex z = kp.z;
  const Complex p = kp.p;
  const double nu = kp.nu;
  // D = c0 - c1 Delta, Nk = n0 - n1 Delta.
  const Complex c0 = z * z + p * p + 2.0 * p * nu + nu * nu;
  const Complex c1 = p * nu + nu * nu;
  const Complex n0 = p + nu;
  const double n1 = 0.5 * nu;
  const int outer_axes = d > 0 ? d - 1 : 0;
  const double inv_d = d > 0 ? 1.0 / d : 0.0;
  const Complex B = c1 * inv_d;
  const double beta = n1 * inv_d;

  auto at_outer_sum = [&](double s) {
    const Complex A = c0 - c1 * (inv_d * s);
    const Complex alpha = n0 - n1 * (inv_d * s);
    const auto cm = detail::cosine_moments(A, B);
    const Complex num = alpha * cm.i0 - beta * cm.i1;
    const Complex num2 =
        alpha * alpha * cm.k0 - 2.0 * alpha * beta * cm.k1 + beta * beta * cm.k2;
    return KernelMoments{cm.i0, num, cm.i0 - 2.0 * num2};
  };

  if (outer_axes == 0) {
    const KernelMoments m = at_outer_sum(0.0);
    if (!finite(m.inv_d) || !finite(m.num) || !finite(m.dnum))
      throw NumericalError("non-finite closed-form kernel average");
    return m;
  }
  const auto table = cos_table(n);
  const std::size_t total = grid_size(n, outer_axes);
  const KernelMoments sum = deterministic_sum<KernelMoments>(
      total,
      [&](std::size_t idx) {
        std::array<int, kMaxDim> ii{};
        decode(idx, n, outer_axes, ii);
        double s = 0.0;
        for (int a = 0; a < outer_axes; ++a)
          s += table[static_cast<std::size_t>(ii[static_cast<std::size_t>(a)])];
        const KernelMoments m = at_outer_sum(s);
        if (!finite(m.inv_d) || !finite(m.num) || !finite(m.dnum))
          throw_nonfinite(idx, n, outer_axes);
        return m;
      },
      exec);
  const double w = 1.0 / static_cast<double>(total);
  return {sum.inv_d * w, sum.num * w, sum.dnum * w};
}

KernelMoments moments(const KernelParams& kp, int d, int n, QuadratureRule rule,
                      Execution exec) {
  return rule == QuadratureRule::kUniform ? moments_uniform(kp, d, n, exec)
                                          : moments_analytic(kp, d, n, exec);
}

}  // namespace

std::string to_string(QuadratureRule rule) {
  return rule == QuadratureRule::kUniform ? "uniform" : "analytic";
}

QuadratureRule quadrature_rule_from_string(const std::string& s) {
  if (s == "uniform") return QuadratureRule::kUniform;
  if (s == "analytic") return QuadratureRule::kAnalyticLastAxis;
  throw ArgumentError("unknown quadrature rule '" + s + "'");
}

void QuadratureSpec::validate() const {
  if (points_per_dim < 4) throw ArgumentError("points_per_dim must be >= 4");
  if (!(rel_tol > 0.0)) throw ArgumentError("rel_tol must be > 0");
}

QuadratureSpec QuadratureSpec::defaults_for(int d) {
  QuadratureSpec s;
  s.points_per_dim = d <= 1 ? 4096 : d == 2 ? 256 : d == 3 ? 64 : 16;
  return s;
}

Complex kernel_D(double delta, const KernelParams& kp) {
  const Complex z = kp.z;
  const Complex p = kp.p;
  const double nu = kp.nu;
  return z * z + p * p + p * nu * (2.0 - delta) + nu * nu * (1.0 - delta);
}

Complex kernel_D(const Wavevector& k, const KernelParams& kp) {
  return kernel_D(delta_k(k, static_cast<int>(k.dim())), kp);
}

QuadResult integrate_bz(const BzIntegrand& f, int d, const QuadratureSpec& spec,
                        Execution exec) {
  check_dim(d);
  spec.validate();
  QuadResult r;
  r.value = uniform_integral(f, d, spec.points_per_dim, exec);
  if (spec.convergence_check) {
    const Complex fine = uniform_integral(f, d, 2 * spec.points_per_dim, exec);
    r.checked = true;
    r.doubling_rel_diff = rel_diff(r.value, fine);
    if (r.doubling_rel_diff > spec.rel_tol)
      r.warning = doubling_warning(r.doubling_rel_diff, spec.rel_tol, spec.points_per_dim);
  }
  return r;
}

KernelIntegrals kernel_integrals(const KernelParams& kp, int d,
                                 const QuadratureSpec& spec, Execution exec) {
  check_dim(d);
  spec.validate();
  KernelIntegrals r;
  r.moments = moments(kp, d, spec.points_per_dim, spec.rule, exec);
  if (spec.convergence_check) {
    const KernelMoments fine = moments(kp, d, 2 * spec.points_per_dim, spec.rule, exec);
    r.checked = true;
    r.doubling_rel_diff = std::max({rel_diff(r.moments.inv_d, fine.inv_d),
                                    rel_diff(r.moments.num, fine.num),
                                    rel_diff(r.moments.dnum, fine.dnum)});
    if (r.doubling_rel_diff > spec.rel_tol)
      r.warning = doubling_warning(r.doubling_rel_diff, spec.rel_tol, spec.points_per_dim);
  }
  return r;
}

QuadResult I_g(const KernelParams& kp, int d, const QuadratureSpec& spec,
               Execution exec) {
  const KernelIntegrals k = kernel_integrals(kp, d, spec, exec);
  return {kp.z * k.moments.inv_d, k.checked, k.doubling_rel_diff, k.warning};
}

QuadResult I_cpa(const KernelParams& kp, int d, const QuadratureSpec& spec,
                 Execution exec) {
  const KernelIntegrals k = kernel_integrals(kp, d, spec, exec);
  return {k.moments.num, k.checked, k.doubling_rel_diff, k.warning};
}

namespace detail {

// Contour form: with w = e^{ik}, 1/(A - B cos k) has poles at
// w = (A +- s)/B, s^2 = A^2 - B^2, whose moduli multiply to one. Choosing the
// sign of s with |A + s| >= |A - s| puts (A - s)/B inside the unit circle and
// the residue gives <1/(A - B cos)> = 1/s. The remaining moments follow from
// <cos^m/(A - B cos)> recursions and -d/dA, rearranged to avoid dividing by B.
CosineMoments cosine_moments(Complex A, Complex B) {
  Complex s = std::sqrt(A * A - B * B);
  if ((std::conj(A) * s).real() < 0.0) s = -s;
  const Complex as = A + s;
  if (s == Complex(0.0) || as == Complex(0.0))
    throw NumericalError("kernel denominator vanishes on the zone");
  const Complex s3 = s * s * s;
  CosineMoments m;
  m.i0 = 1.0 / s;
  m.i1 = B / (s * as);
  m.i2 = A / (s * as);
  m.k0 = A / s3;
  m.k1 = B / s3;
  m.k2 = (B * B + A * s) / (s3 * as);
  return m;
}

}  // namespace detail

}  // namespace bosoncpa
