#include "bosoncpa/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bosoncpa/errors.hpp"

#ifndef BOSONCPA_VERSION
#define BOSONCPA_VERSION "unknown"
#endif

namespace bosoncpa {

std::string_view library_version() { return BOSONCPA_VERSION; }

void CsvTable::set(const std::string& key, const std::string& value) {
  for (auto& kv : metadata)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  metadata.emplace_back(key, value);
}

const std::string* CsvTable::find(const std::string& key) const {
  for (const auto& kv : metadata)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

const std::string& CsvTable::get(const std::string& key) const {
  if (const auto* v = find(key)) return *v;
  throw IoError("missing metadata key '" + key + "'");
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw IoError("missing column '" + name + "'");
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError("not a number: '" + std::string(s) + "'");
  return x;
}

namespace {

std::string one_line(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == '\n' || c == '\r') c = ' ';
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto t = trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw IoError("not an integer: '" + s + "'");
  return v;
}

}  // namespace

void write_csv(const CsvTable& table, std::ostream& os) {
  for (const auto& [k, v] : table.metadata) os << "# " << k << " = " << one_line(v) << '\n';
  for (const auto& w : table.warnings) os << "# warning: " << one_line(w) << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw ArgumentError("row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

void write_csv_file(const CsvTable& table, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_csv(table, os);
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("warning:", 0) == 0) {
        t.warnings.push_back(trim(std::string_view(body).substr(8)));
      } else if (const auto eq = body.find(" = "); eq != std::string::npos) {
        t.metadata.emplace_back(trim(std::string_view(body).substr(0, eq)),
                                trim(std::string_view(body).substr(eq + 3)));
      }
      continue;
    }
    if (!header) {
      t.columns = split(line, ',');
      header = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size())
      throw IoError("line " + std::to_string(lineno) + ": expected " +
                    std::to_string(t.columns.size()) + " fields");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  if (!header) throw IoError("no header row");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_csv(is);
}

namespace {

void put_params(CsvTable& t, const ModelParams& p) {
  t.set("d", std::to_string(p.d));
  std::string ext;
  for (std::size_t i = 0; i < p.extents.size(); ++i)
    ext += (i ? "x" : "") + std::to_string(p.extents[i]);
  t.set("extents", ext.empty() ? "-" : ext);
  t.set("N", p.bands ? std::to_string(*p.bands) : "-");
  t.set("M", p.aux_dim ? std::to_string(*p.aux_dim) : "-");
  t.set("a", format_double(p.a));
  t.set("b", format_double(p.b));
  t.set("nu", format_double(p.nu));
}

ModelParams get_params(const CsvTable& t) {
  ModelParams p;
  p.d = static_cast<int>(parse_int(t.get("d")));
  if (const auto& e = t.get("extents"); e != "-")
    for (const auto& part : split(e, 'x')) p.extents.push_back(static_cast<int>(parse_int(part)));
  if (const auto& n = t.get("N"); n != "-") p.bands = static_cast<int>(parse_int(n));
  if (const auto& m = t.get("M"); m != "-") p.aux_dim = static_cast<int>(parse_int(m));
  p.a = parse_double(t.get("a"));
  p.b = parse_double(t.get("b"));
  p.nu = parse_double(t.get("nu"));
  return p;
}

}  // namespace

CsvTable to_table(const DosCurve& curve) {
  CsvTable t;
  t.set("kind", "dos");
  t.set("version", std::string(library_version()));
  put_params(t, curve.params);
  t.set("eps", format_double(curve.eps));
  t.set("kgrid", std::to_string(curve.quad.points_per_dim));
  t.set("quadrature", to_string(curve.quad.rule));
  t.set("dirac_mass_at_zero", format_double(curve.dirac_mass_at_zero));
  t.warnings = curve.warnings;
  t.columns = {"omega", "rho", "p_re", "p_im", "residual"};
  t.rows.reserve(curve.omegas.size());
  for (std::size_t i = 0; i < curve.omegas.size(); ++i)
    t.rows.push_back({curve.omegas[i], curve.rho[i], curve.p[i].real(),
                      curve.p[i].imag(), curve.residual[i]});
  return t;
}

DosCurve dos_curve_from_table(const CsvTable& t) {
  DosCurve c;
  c.params = get_params(t);
  c.eps = parse_double(t.get("eps"));
  c.quad.points_per_dim = static_cast<int>(parse_int(t.get("kgrid")));
  c.quad.rule = quadrature_rule_from_string(t.get("quadrature"));
  c.dirac_mass_at_zero = parse_double(t.get("dirac_mass_at_zero"));
  c.warnings = t.warnings;
  const auto io = t.column("omega"), ir = t.column("rho"), ipr = t.column("p_re"),
             ipi = t.column("p_im"), ires = t.column("residual");
  for (const auto& row : t.rows) {
    c.omegas.push_back(row[io]);
    c.rho.push_back(row[ir]);
    c.p.emplace_back(row[ipr], row[ipi]);
    c.residual.push_back(row[ires]);
  }
  return c;
}

CsvTable to_table(const SpectrumHistogram& h) {
  CsvTable t;
  t.set("kind", "histogram");
  t.set("version", std::string(library_version()));
  t.set("samples", std::to_string(h.samples));
  t.set("total_eigenvalues", std::to_string(h.total_eigenvalues));
  t.set("zero_mode_count", std::to_string(h.zero_mode_count));
  t.set("overflow_count", std::to_string(h.overflow_count));
  t.set("zero_fraction", format_double(h.zero_fraction()));
  t.columns = {"bin_left", "bin_right", "density", "count"};
  for (std::size_t i = 0; i < h.bins(); ++i)
    t.rows.push_back({h.bin_edges[i], h.bin_edges[i + 1], h.density(i),
                      static_cast<double>(h.counts[i])});
  return t;
}

SpectrumHistogram histogram_from_table(const CsvTable& t) {
  SpectrumHistogram h;
  h.samples = static_cast<std::uint64_t>(parse_int(t.get("samples")));
  h.total_eigenvalues = static_cast<std::uint64_t>(parse_int(t.get("total_eigenvalues")));
  h.zero_mode_count = static_cast<std::uint64_t>(parse_int(t.get("zero_mode_count")));
  h.overflow_count = static_cast<std::uint64_t>(parse_int(t.get("overflow_count")));
  const auto il = t.column("bin_left"), ir = t.column("bin_right"), ic = t.column("count");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (i == 0) h.bin_edges.push_back(row[il]);
    else if (row[il] != h.bin_edges.back())
      throw IoError("histogram bins are not contiguous");
    h.bin_edges.push_back(row[ir]);
    const double c = row[ic];
    if (!(c >= 0.0) || c != std::floor(c)) throw IoError("bad bin count");
    h.counts.push_back(static_cast<std::uint64_t>(c));
  }
  return h;
}

}  // namespace bosoncpa
