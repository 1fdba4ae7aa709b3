#include "bosoncpa/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bosoncpa/errors.hpp"

namespace bosoncpa {

ModelParams ModelParams::with_dims(int d, std::vector<int> extents, int bands,
                                   int aux_dim, double b, double nu) {
  ModelParams p;
  p.d = d;
  p.extents = std::move(extents);
  p.bands = bands;
  p.aux_dim = aux_dim;
  p.a = static_cast<double>(aux_dim) / (2.0 * bands);
  p.b = b;
  p.nu = nu;
  return p;
}

void ModelParams::validate() const {
  if (d < 0) throw ArgumentError("d must be non-negative");
  if (d == 0 && nu != 0.0)
    throw ArgumentError("d = 0 (single site) requires nu = 0");
  if (!(b >= 0.0) || !std::isfinite(b)) throw ArgumentError("b must be >= 0");
  if (!(nu >= 0.0) || !std::isfinite(nu))
    throw ArgumentError("nu must be >= 0");
  if (b == 0.0 && nu == 0.0)
    throw ArgumentError("b and nu must not both be zero");
  if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("a must be > 0");
  if (bands.has_value() != aux_dim.has_value())
    throw ArgumentError("N and M must be given together");
  if (bands) {
    if (*bands < 1) throw ArgumentError("N must be >= 1");
    if (*aux_dim < 1) throw ArgumentError("M must be >= 1");
    if (a != static_cast<double>(*aux_dim) / (2.0 * *bands))
      throw ArgumentError("a must equal M/(2N)");
  }
  if (!extents.empty() && static_cast<int>(extents.size()) != d)
    throw ArgumentError("extents must have d entries");
}

void ModelParams::validate_for_sampling() const {
  validate();
  if (!bands) throw ArgumentError("Monte Carlo sampling needs N and M");
  if (static_cast<int>(extents.size()) != d)
    throw ArgumentError("Monte Carlo sampling needs d lattice extents");
  for (int e : extents)
    if (e < 3)
      throw ArgumentError(
          "periodic lattice extents must be >= 3 (nearest-neighbour pairs "
          "would be double counted)");
}

std::vector<std::string> ModelParams::sampling_warnings() const {
  std::vector<std::string> w;
  if (aux_dim && *aux_dim < 2)
    w.emplace_back(
        "M = 1: the large-N CPA equations are not justified for M < 2; "
        "sampling proceeds");
  return w;
}

std::size_t ModelParams::site_count() const {
  std::size_t n = 1;
  for (int e : extents) n *= static_cast<std::size_t>(e);
  return n;
}

std::string ModelParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "d=" << d << " extents=";
  for (std::size_t i = 0; i < extents.size(); ++i)
    os << (i ? "x" : "") << extents[i];
  if (extents.empty()) os << "-";
  os << " N=";
  if (bands) os << *bands; else os << "-";
  os << " M=";
  if (aux_dim) os << *aux_dim; else os << "-";
  os << " a=" << a << " b=" << b << " nu=" << nu;
  return os.str();
}

Wavevector::Wavevector(std::vector<double> k) : k_(std::move(k)) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (double& c : k_) {
    if (!std::isfinite(c)) throw ArgumentError("wavevector must be finite");
    c = std::fmod(c, two_pi);
    if (c < 0.0) c += two_pi;
    if (c >= two_pi) c = 0.0;
  }
}

Lattice::Lattice(std::vector<int> extents) : extents_(std::move(extents)) {
  strides_.assign(extents_.size(), 1);
  for (int i = static_cast<int>(extents_.size()) - 1; i >= 0; --i) {
    if (extents_[i] < 1) throw ArgumentError("lattice extent must be >= 1");
    strides_[i] = size_;
    size_ *= static_cast<std::size_t>(extents_[i]);
  }
}

std::vector<int> Lattice::coords(std::size_t site) const {
  std::vector<int> c(extents_.size());
  for (std::size_t i = 0; i < extents_.size(); ++i)
    c[i] = static_cast<int>((site / strides_[i]) % extents_[i]);
  return c;
}

std::size_t Lattice::index(std::span<const int> coords) const {
  if (coords.size() != extents_.size())
    throw ArgumentError("lattice coordinate count mismatch");
  std::size_t s = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const int e = extents_[i];
    const int c = ((coords[i] % e) + e) % e;
    s += strides_[i] * static_cast<std::size_t>(c);
  }
  return s;
}

std::size_t Lattice::neighbor(std::size_t site, int axis, int sign) const {
  auto c = coords(site);
  c[axis] += sign;
  return index(c);
}

double delta_k(const Wavevector& k, int d) {
  if (d < 1 || k.dim() != static_cast<std::size_t>(d))
    throw ArgumentError("wavevector dimension does not match d");
  double s = 0.0;
  for (double c : k.components()) s += std::cos(c);
  return s / d;
}

double dispersion(const Wavevector& k, double nu) {
  const double delta = delta_k(k, static_cast<int>(k.dim()));
  return nu * std::sqrt(std::max(0.0, 1.0 - delta));
}

Eigen::Matrix2cd k1_block(const Wavevector& k, double nu) {
  const double delta = delta_k(k, static_cast<int>(k.dim()));
  const Complex pre(0.0, -0.5 * nu);
  Eigen::Matrix2cd m;
  m << 2.0 - delta, -delta, delta, -2.0 + delta;
  return pre * m;
}

SparseComplexMatrix assemble_K(const ModelParams& params) {
  params.validate();
  if (!params.bands) throw ArgumentError("assemble_K needs N");
  if (static_cast<int>(params.extents.size()) != params.d)
    throw ArgumentError("assemble_K needs d lattice extents");
  for (int e : params.extents)
    if (e < 3) throw ArgumentError("periodic lattice extents must be >= 3");

  const int n_bands = *params.bands;
  const Lattice lattice(params.extents);
  const auto dim = static_cast<Eigen::Index>(2 * n_bands * lattice.size());
  SparseComplexMatrix k(dim, dim);
  if (params.d == 0 || params.nu == 0.0) return k;

  const Complex pre(0.0, -0.5 * params.nu);
  // Each directed bond carries 1/(2d) of the symbol; the two directions of an
  // undirected pair reproduce cos(k_i)/d.
  const double hop = 1.0 / (2.0 * params.d);
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(dim) * (2 + 8 * params.d));

  for (std::size_t s = 0; s < lattice.size(); ++s) {
    for (int n = 0; n < n_bands; ++n) {
      const auto i0 = static_cast<Eigen::Index>(basis_index(s, 0, n, n_bands));
      const auto i1 = static_cast<Eigen::Index>(basis_index(s, 1, n, n_bands));
      t.emplace_back(i0, i0, pre * 2.0);
      t.emplace_back(i1, i1, pre * -2.0);
    }
    for (int axis = 0; axis < params.d; ++axis) {
      for (int sign : {+1, -1}) {
        const std::size_t s2 = lattice.neighbor(s, axis, sign);
        for (int n = 0; n < n_bands; ++n) {
          const auto r0 = static_cast<Eigen::Index>(basis_index(s, 0, n, n_bands));
          const auto r1 = static_cast<Eigen::Index>(basis_index(s, 1, n, n_bands));
          const auto c0 = static_cast<Eigen::Index>(basis_index(s2, 0, n, n_bands));
          const auto c1 = static_cast<Eigen::Index>(basis_index(s2, 1, n, n_bands));
          t.emplace_back(r0, c0, pre * -hop);
          t.emplace_back(r0, c1, pre * -hop);
          t.emplace_back(r1, c0, pre * hop);
          t.emplace_back(r1, c1, pre * hop);
        }
      }
    }
  }
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

}  // namespace bosoncpa
