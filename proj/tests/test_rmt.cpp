#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bosoncpa/cpa.hpp"
#include "bosoncpa/errors.hpp"
#include "oracles.hpp"

using namespace bosoncpa;
using std::numbers::pi;

TEST_CASE("cubic roots satisfy the random-matrix equation") {
  for (double a : {0.5, 1.0, 2.0})
    for (Complex z : {Complex(0.1, 0.3), Complex(1e-6, 1.7), Complex(3.0, 0.0)}) {
      const double b = 0.8;
      for (const Complex& p : rmt_cubic_roots(z, a, b)) {
        const Complex f = p * p * p + (1.0 - a) * b * p * p + z * z * p - a * b * z * z;
        CHECK(std::abs(f) < 1e-12 * (1.0 + std::norm(z) * std::abs(p) + std::pow(std::abs(p), 3)));
      }
    }
}

TEST_CASE("physical root matches the oracle and is Herglotz") {
  for (double a : {0.75, 1.0, 1.25, 2.0})
    for (double eps : {1e-3, 1e-6, 1e-9})
      for (double w : {0.05, 0.4, 1.0, 2.0, 4.0}) {
        const Complex z(eps, w);
        const Complex p = rmt_solve_p(z, a, 1.0);
        CHECK(p.real() > 0.0);
        CHECK(std::abs(p - oracle::rmt_p(z, a, 1.0)) < 1e-10 * std::abs(p));
        CHECK(rmt_g(z, a, 1.0).real() >= 0.0);
      }
}

TEST_CASE("large-z asymptote of the random-matrix branch") {
  const Complex p = rmt_solve_p(1e4, 0.75, 0.5);
  CHECK(std::abs(p - 0.375) < 1e-4);
  CHECK(std::abs(rmt_g(1e4, 0.75, 0.5) - 1e-4) < 1e-9);
}

TEST_CASE("rmt_g is odd") {
  const Complex z(0.3, 0.8);
  CHECK(rmt_g(-z, 1.5, 1.0) == -rmt_g(z, 1.5, 1.0));
  CHECK_THROWS_AS(rmt_solve_p({0.0, 1.0}, 1.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(rmt_cubic_roots(1.0, 1.0, 0.0), ArgumentError);
}

TEST_CASE("rmt_dos_curve residuals and Dirac mass") {
  std::vector<double> grid;
  for (int i = 1; i <= 100; ++i) grid.push_back(0.04 * i);
  const auto c = rmt_dos_curve(grid, 1e-3, 0.75, 1.0);
  CHECK(c.dirac_mass_at_zero == 0.25);
  for (double r : c.residual) CHECK(r <= 1e-12);
  for (double r : c.rho) CHECK(r >= 0.0);
  CHECK(rmt_dos_curve(grid, 1e-3, 2.0, 1.0).dirac_mass_at_zero == 0.0);
}

TEST_CASE("scaled a = 1 cubic: roots, large-x series and density sign") {
  std::vector<double> xs;
  for (double x = 1e-6; x < 1e3; x *= 1.7) xs.push_back(x);
  const auto pts = rmt_scaled_a1(xs);
  for (const auto& pt : pts) {
    const Complex g = pt.gtilde;
    CHECK(std::abs(g * g * g - g + 1.0 / pt.x) < 1e-10 * (1.0 + std::pow(std::abs(g), 3)));
    CHECK(pt.density >= 0.0);
    if (pt.x > 3.0 * std::sqrt(3.0) / 2.0 + 1e-9) CHECK(pt.density == 0.0);
    if (pt.x < 2.5) CHECK(pt.density > 0.0);
    if (pt.x > 50.0) {
      const double series = 1.0 / pt.x + std::pow(pt.x, -3);
      CHECK(std::abs(g.real() - series) < 5.0 * std::pow(pt.x, -5));
    }
  }
  CHECK_THROWS_AS(rmt_scaled_a1(std::vector<double>{0.0}), ArgumentError);
}

TEST_CASE("scaled a = 1 density agrees with the unscaled Newton path") {
  const double b = 0.7;
  const std::vector<double> xs{0.05, 0.3, 1.0, 2.0, 2.5};
  const auto pts = rmt_scaled_a1(xs);
  ModelParams params;
  params.d = 0;
  params.a = 1.0;
  params.b = b;
  params.nu = 0.0;
  QuadratureSpec quad;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Complex z(1e-13 * b, b * xs[i]);
    const auto cp = resolve(z, params, quad, {});
    const Complex gt = Complex(0.0, 1.0) * b * cp.g;
    CHECK(std::abs(gt - pts[i].gtilde) < 1e-9);
    // rho(omega) = density(omega / b) / b
    CHECK(std::abs(cp.g.real() / pi - pts[i].density / b) < 1e-9);
  }
}

TEST_CASE("gap edge grows with a - 1") {
  double prev = 0.0;
  for (double a : {1.25, 1.5, 2.0}) {
    const auto edge = rmt_gap_edge(a, 1.0, 1e-9);
    REQUIRE(edge.has_value());
    CHECK(*edge > prev);
    prev = *edge;
  }
  CHECK_FALSE(rmt_gap_edge(0.75, 1.0, 1e-9).has_value());
}
