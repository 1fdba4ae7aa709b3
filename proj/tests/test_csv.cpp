#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "bosoncpa/csv.hpp"
#include "bosoncpa/errors.hpp"

using namespace bosoncpa;

namespace {

std::uint64_t bits(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  return u;
}

DosCurve sample_curve() {
  DosCurve c;
  c.params.d = 2;
  c.params.extents = {4, 5};
  c.params.bands = 3;
  c.params.aux_dim = 4;
  c.params.a = 4.0 / 6.0;
  c.params.b = 0.63;
  c.params.nu = 1.0 / 3.0;
  c.eps = 1e-3 / 7.0;
  c.quad.points_per_dim = 333;
  c.quad.rule = QuadratureRule::kUniform;
  c.dirac_mass_at_zero = 0.1 + 0.2;
  c.warnings = {"first warning", "second\nwarning"};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    c.omegas.push_back(0.01 * (i + 1) + 1e-17 * i);
    c.rho.push_back(std::abs(u(rng)) * 1e-300);
    c.p.emplace_back(u(rng), u(rng) * 1e10);
    c.residual.push_back(std::ldexp(std::abs(u(rng)), -60));
  }
  return c;
}

}  // namespace

TEST_CASE("double formatting round-trips exactly") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20000; ++i) {
    double x;
    const std::uint64_t u = rng();
    std::memcpy(&x, &u, sizeof x);
    if (!std::isfinite(x)) continue;
    CHECK(bits(parse_double(format_double(x))) == bits(x));
  }
  for (double x : {0.0, -0.0, 1.0, 0.1, 1e-320, std::numeric_limits<double>::max()})
    CHECK(bits(parse_double(format_double(x))) == bits(x));
  CHECK(std::isnan(parse_double("nan")));
  CHECK_THROWS_AS(parse_double("1.0x"), IoError);
  CHECK_THROWS_AS(parse_double(""), IoError);
}

TEST_CASE("DosCurve round trip is bit exact") {
  const DosCurve c = sample_curve();
  std::ostringstream os;
  write_csv(to_table(c), os);
  const std::string text = os.str();
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.find("# dirac_mass_at_zero = 0.30000000000000004\n") != std::string::npos);
  CHECK(text.find("omega,rho,p_re,p_im,residual\n") != std::string::npos);
  std::istringstream is(text);
  const DosCurve back = dos_curve_from_table(read_csv(is));
  REQUIRE(back.omegas.size() == c.omegas.size());
  for (std::size_t i = 0; i < c.omegas.size(); ++i) {
    CHECK(bits(back.omegas[i]) == bits(c.omegas[i]));
    CHECK(bits(back.rho[i]) == bits(c.rho[i]));
    CHECK(bits(back.p[i].real()) == bits(c.p[i].real()));
    CHECK(bits(back.p[i].imag()) == bits(c.p[i].imag()));
    CHECK(bits(back.residual[i]) == bits(c.residual[i]));
  }
  CHECK(bits(back.eps) == bits(c.eps));
  CHECK(bits(back.dirac_mass_at_zero) == bits(c.dirac_mass_at_zero));
  CHECK(back.params.d == 2);
  CHECK(back.params.extents == c.params.extents);
  CHECK(back.params.bands == c.params.bands);
  CHECK(back.params.aux_dim == c.params.aux_dim);
  CHECK(bits(back.params.a) == bits(c.params.a));
  CHECK(bits(back.params.nu) == bits(c.params.nu));
  CHECK(back.quad.points_per_dim == 333);
  CHECK(back.quad.rule == QuadratureRule::kUniform);
  CHECK(back.warnings.size() == 2);
  CHECK(back.warnings[1] == "second warning");
}

TEST_CASE("histogram round trip") {
  SpectrumHistogram h;
  h.bin_edges = {0.0, 0.1, 0.2, 0.30000000000000004};
  h.counts = {5, 0, 17};
  h.total_eigenvalues = 30;
  h.zero_mode_count = 6;
  h.overflow_count = 2;
  h.samples = 3;
  std::ostringstream os;
  write_csv(to_table(h), os);
  CHECK(os.str().find("bin_left,bin_right,density,count\n") != std::string::npos);
  std::istringstream is(os.str());
  const auto back = histogram_from_table(read_csv(is));
  CHECK(back.bin_edges == h.bin_edges);
  CHECK(back.counts == h.counts);
  CHECK(back.total_eigenvalues == 30);
  CHECK(back.zero_mode_count == 6);
  CHECK(back.overflow_count == 2);
  CHECK(back.samples == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back.density(i) == h.density(i));
}

TEST_CASE("empty curve writes a header-only table") {
  DosCurve c;
  c.eps = 1e-3;
  std::ostringstream os;
  write_csv(to_table(c), os);
  std::istringstream is(os.str());
  const auto t = read_csv(is);
  CHECK(t.rows.empty());
  CHECK(t.columns.size() == 5);
  CHECK(dos_curve_from_table(t).omegas.empty());
}

TEST_CASE("malformed input is reported") {
  std::istringstream no_header("# a = 1\n");
  CHECK_THROWS_AS(read_csv(no_header), IoError);
  std::istringstream ragged("x,y\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(ragged), IoError);
  std::istringstream bad("x,y\n1,abc\n");
  CHECK_THROWS_AS(read_csv(bad), IoError);
  std::istringstream crlf("# k = v\r\nx,y\r\n1,2\r\n");
  const auto t = read_csv(crlf);
  CHECK(t.get("k") == "v");
  CHECK(t.rows.at(0).at(1) == 2.0);
  CHECK_THROWS_AS(t.get("missing"), IoError);
  CHECK_THROWS_AS(t.column("z"), IoError);
}

TEST_CASE("file I/O errors") {
  CHECK_THROWS_AS(read_csv_file("/nonexistent/dir/file.csv"), IoError);
  CHECK_THROWS_AS(write_csv_file(CsvTable{}, "/nonexistent/dir/file.csv"), IoError);
  const auto path = std::filesystem::temp_directory_path() / "bosoncpa_csv_test.csv";
  write_csv_file(to_table(sample_curve()), path.string());
  const auto back = dos_curve_from_table(read_csv_file(path.string()));
  CHECK(back.omegas.size() == 50);
  std::filesystem::remove(path);
}
