#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bosoncpa/cpa.hpp"
#include "bosoncpa/errors.hpp"

namespace bosoncpa {
namespace {

void check_rmt_args(double a, double b) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("a must be > 0");
  if (!(b > 0.0) || !std::isfinite(b))
    throw ArgumentError("the random-matrix limit needs b > 0");
}

// p^3 + c2 p^2 + c1 p + c0
Complex cubic(Complex p, Complex c2, Complex c1, Complex c0) {
  return ((p + c2) * p + c1) * p + c0;
}
Complex cubic_deriv(Complex p, Complex c2, Complex c1) {
  return (3.0 * p + 2.0 * c2) * p + c1;
}

}  // namespace

std::vector<Complex> rmt_cubic_roots(Complex z, double a, double b) {
  check_rmt_args(a, b);
  const Complex z2 = z * z;
  const Complex c2 = (1.0 - a) * b;
  const Complex c1 = z2;
  const Complex c0 = -a * b * z2;

  Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
  companion(0, 0) = -c2;
  companion(0, 1) = -c1;
  companion(0, 2) = -c0;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(companion, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("companion eigensolve failed for the random-matrix cubic");

  std::vector<Complex> roots(3);
  for (int i = 0; i < 3; ++i) {
    Complex r = es.eigenvalues()(i);
    for (int it = 0; it < 4; ++it) {
      const Complex d = cubic_deriv(r, c2, c1);
      if (d == Complex(0.0)) break;
      const Complex next = r - cubic(r, c2, c1, c0) / d;
      if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
      if (std::abs(cubic(next, c2, c1, c0)) >= std::abs(cubic(r, c2, c1, c0))) break;
      r = next;
    }
    roots[static_cast<std::size_t>(i)] = r;
  }
  return roots;
}

Complex rmt_solve_p(Complex z, double a, double b) {
  if (z.real() == 0.0) throw ArgumentError("rmt_solve_p requires Re z != 0");
  if (z.real() < 0.0) return rmt_solve_p(-z, a, b);
  const auto roots = rmt_cubic_roots(z, a, b);
  int chosen = -1;
  double best = -1.0;
  int admissible = 0;
  for (int i = 0; i < 3; ++i) {
    const Complex p = roots[static_cast<std::size_t>(i)];
    const Complex g = z / (z * z + p * p);
    if (p.real() > 0.0 && g.real() > 0.0) {
      ++admissible;
      if (g.real() > best) {
        best = g.real();
        chosen = i;
      }
    }
  }
  if (chosen < 0) {
    std::ostringstream os;
    os << "no root of the random-matrix cubic has Re p > 0 and Re g > 0 at z = "
       << z;
    throw BranchError(os.str());
  }
  return roots[static_cast<std::size_t>(chosen)];
}

Complex rmt_g(Complex z, double a, double b) {
  if (z.real() < 0.0) return -rmt_g(-z, a, b);
  const Complex p = rmt_solve_p(z, a, b);
  return z / (z * z + p * p);
}

DosCurve rmt_dos_curve(std::span<const double> omega_grid, double eps, double a,
                       double b) {
  check_rmt_args(a, b);
  if (!(eps > 0.0)) throw ArgumentError("eps must be > 0");
  DosCurve curve;
  curve.params.d = 0;
  curve.params.a = a;
  curve.params.b = b;
  curve.params.nu = 0.0;
  curve.eps = eps;
  curve.dirac_mass_at_zero = std::max(0.0, 1.0 - a);
  curve.omegas.assign(omega_grid.begin(), omega_grid.end());
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    if (!(omega_grid[i] > 0.0)) throw ArgumentError("omega grid must be positive");
    if (i > 0 && !(omega_grid[i] > omega_grid[i - 1]))
      throw ArgumentError("omega grid must be strictly ascending");
    const Complex z(eps, omega_grid[i]);
    const Complex p = rmt_solve_p(z, a, b);
    const Complex g = z / (z * z + p * p);
    const Complex pz = p / (z * z + p * p);
    const Complex r = 1.0 / b - a / p + pz;
    const double scale = std::max({1.0 / b, std::abs(a / p), std::abs(pz)});
    curve.rho.push_back(g.real() / std::numbers::pi - dirac_tail(curve.dirac_mass_at_zero, z));
    curve.p.push_back(p);
    curve.residual.push_back(std::abs(r) / scale);
  }
  return curve;
}

std::optional<double> rmt_gap_edge(double a, double b, double eps,
                                   double threshold) {
  check_rmt_args(a, b);
  if (a <= 1.0) return std::nullopt;
  auto rho_at = [&](double w) {
    return rmt_g(Complex(eps, w), a, b).real() / std::numbers::pi;
  };
  // The support of the a > 1 density starts below b * (1 + sqrt(a))^2; scan
  // a coarse grid for the first point above threshold, then bisect.
  const double top = b * (1.0 + std::sqrt(a)) * (1.0 + std::sqrt(a));
  const int n = 2000;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = top * (i + 1) / n;
  DosCurve coarse;
  coarse.omegas = w;
  for (double x : w) coarse.rho.push_back(rho_at(x));
  return locate_gap_edge(coarse, rho_at, threshold, 1e-12 * top);
}

std::vector<ScaledDensityPoint> rmt_scaled_a1(std::span<const double> x_grid) {
  std::vector<ScaledDensityPoint> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ArgumentError("x must be > 0");
    // Depressed cubic t^3 - t + c = 0 with c = 1/x.
    const double c = 1.0 / x;
    const double disc = c * c / 4.0 - 1.0 / 27.0;
    ScaledDensityPoint pt{x, 0.0, 0.0};
    if (disc > 0.0) {
      // One real root and a complex pair (Cardano). u v = 1/3; take v from
      // the non-cancelling branch.
      const double r = std::sqrt(disc);
      const double v = std::cbrt(-0.5 * c - r);
      const double u = 1.0 / (3.0 * v);
      const double re = -0.5 * (u + v);
      const double im = 0.5 * std::sqrt(3.0) * std::abs(u - v);
      pt.gtilde = Complex(re, im);
      pt.density = im / std::numbers::pi;
    } else {
      // Three real roots; the physical one is the smallest positive root,
      // continuous with gtilde ~ 1/x at large x.
      const double theta = std::acos(std::clamp(-1.5 * std::sqrt(3.0) * c, -1.0, 1.0));
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 3; ++k) {
        const double t = 2.0 / std::sqrt(3.0) *
                         std::cos(theta / 3.0 - 2.0 * std::numbers::pi * k / 3.0);
        if (t > 0.0 && t < best) best = t;
      }
      if (!std::isfinite(best))
        throw BranchError("no admissible root of the scaled a = 1 cubic");
      // Polish: the trigonometric form loses digits for small c.
      for (int it = 0; it < 3; ++it) {
        const double f = (best * best - 1.0) * best + c;
        const double df = 3.0 * best * best - 1.0;
        if (df == 0.0) break;
        best -= f / df;
      }
      pt.gtilde = Complex(best, 0.0);
      pt.density = 0.0;
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace bosoncpa
