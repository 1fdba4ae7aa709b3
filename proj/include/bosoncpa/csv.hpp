#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bosoncpa/cpa.hpp"
#include "bosoncpa/ensemble.hpp"

namespace bosoncpa {

/// Library version string baked in at build time.
std::string_view library_version();

/// Plot-ready table: `# key = value` metadata lines, `# warning: ...` lines,
/// one header row and numeric rows. Numbers use the shortest representation
/// that parses back to the same double.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> warnings;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void set(const std::string& key, const std::string& value);
  const std::string* find(const std::string& key) const;
  /// Throws IoError when the key is absent.
  const std::string& get(const std::string& key) const;
  /// Index of a column; throws IoError when absent.
  std::size_t column(const std::string& name) const;
};

std::string format_double(double x);
/// Strict parse of a whole token; throws IoError.
double parse_double(std::string_view s);

void write_csv(const CsvTable& table, std::ostream& os);
void write_csv_file(const CsvTable& table, const std::string& path);
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

/// Columns omega, rho, p_re, p_im, residual. Metadata carries the model
/// parameters, quadrature, eps and dirac_mass_at_zero.
CsvTable to_table(const DosCurve& curve);
DosCurve dos_curve_from_table(const CsvTable& table);

/// Columns bin_left, bin_right, density, count.
CsvTable to_table(const SpectrumHistogram& hist);
SpectrumHistogram histogram_from_table(const CsvTable& table);

}  // namespace bosoncpa
