#include "attractor_forge/field_space.hpp"

#include <cmath>
#include <numbers>

#include "attractor_forge/errors.hpp"
#include "attractor_forge/kernels.hpp"
#include "attractor_forge/tridiagonal.hpp"

namespace af {

// ---------------------------------------------------------------- tridiagonal

void Tridiagonal::multiply(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += lower[i] * x[i - 1];
    if (i + 1 < n) s += upper[i] * x[i + 1];
    out[i] = s;
  }
}

std::vector<double> solve_tridiagonal(const Tridiagonal& m, std::span<const double> rhs) {
  const std::size_t n = m.size();
  std::vector<double> c(n), d(n);
  double pivot = m.diag[0];
  if (pivot == 0.0) throw InternalError("tridiagonal solve: zero pivot at row 0");
  c[0] = n > 1 ? m.upper[0] / pivot : 0.0;
  d[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = m.diag[i] - m.lower[i] * c[i - 1];
    if (pivot == 0.0)
      throw InternalError("tridiagonal solve: zero pivot at row " + std::to_string(i));
    c[i] = i + 1 < n ? m.upper[i] / pivot : 0.0;
    d[i] = (rhs[i] - m.lower[i] * d[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

// ---------------------------------------------------------------- grid / field

SpatialGrid::SpatialGrid(std::size_t n_interior, double length)
    : n_(n_interior), length_(length), spacing_(length / static_cast<double>(n_interior + 1)) {
  if (n_interior < 2) throw ConfigError("SpatialGrid: need at least 2 interior nodes");
  if (!(length > 0.0) || !std::isfinite(length))
    throw ConfigError("SpatialGrid: length must be positive and finite");
}

double SpatialGrid::eigenvalue(std::size_t k) const noexcept {
  const double s = std::sin(std::numbers::pi * static_cast<double>(k) /
                            (2.0 * static_cast<double>(n_ + 1)));
  return 4.0 * s * s / (spacing_ * spacing_);
}

double SpatialGrid::principal_eigenvalue() const noexcept { return eigenvalue(1); }

Field::Field(const SpatialGrid& grid) : grid_(grid), values_(grid.n_interior(), 0.0) {}

Field::Field(const SpatialGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n_interior())
    throw InvalidFieldError("Field: value count " + std::to_string(values_.size()) +
                            " does not match grid size " + std::to_string(grid_.n_interior()));
}

Field Field::constant(const SpatialGrid& grid, double c) {
  return Field(grid, std::vector<double>(grid.n_interior(), c));
}

Field Field::sample(const SpatialGrid& grid, const std::function<double(double)>& f) {
  Field out(grid);
  for (std::size_t i = 0; i < grid.n_interior(); ++i) out.values_[i] = f(grid.node(i));
  return out;
}

Field Field::mode(const SpatialGrid& grid, std::size_t k) {
  const double w = std::numbers::pi * static_cast<double>(k) / grid.length();
  return sample(grid, [w](double x) { return std::numbers::sqrt2 * std::sin(w * x); });
}

bool Field::all_finite() const noexcept {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Field::require_finite(const char* context) const {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw InvalidFieldError(std::string(context) + ": non-finite value at node " +
                              std::to_string(i));
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()))
    throw GridMismatchError("fields live on different grids (n=" +
                            std::to_string(a.grid().n_interior()) + " vs " +
                            std::to_string(b.grid().n_interior()) + ")");
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o);
  kernels::axpy(1.0, o.values_, values_);
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o);
  kernels::axpy(-1.0, o.values_, values_);
  return *this;
}

Field& Field::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

Field& Field::add_scaled(double a, const Field& o) {
  require_same_grid(*this, o);
  kernels::axpy(a, o.values_, values_);
  return *this;
}

// ---------------------------------------------------------------- triples

std::string to_string(TripleKind kind) {
  switch (kind) {
    case TripleKind::RDE: return "rde";
    case TripleKind::PME: return "pme";
    case TripleKind::PLE: return "ple";
    case TripleKind::POINTWISE: return "pointwise";
  }
  return "?";
}

TripleKind triple_kind_from_string(const std::string& s) {
  if (s == "rde") return TripleKind::RDE;
  if (s == "pme") return TripleKind::PME;
  if (s == "ple") return TripleKind::PLE;
  if (s == "pointwise") return TripleKind::POINTWISE;
  throw ConfigError("unknown triple kind '" + s + "'");
}

void TripleSpec::validate() const {
  double expected = 2.0;
  switch (kind) {
    case TripleKind::RDE: expected = 2.0; break;
    case TripleKind::PME:
      if (!(exponent > 1.0)) throw ConfigError("PME triple needs r > 1");
      expected = exponent + 1.0;
      break;
    case TripleKind::PLE:
      if (!(exponent > 2.0)) throw ConfigError("PLE triple needs p > 2");
      expected = exponent;
      break;
    case TripleKind::POINTWISE:
      if (!(exponent >= 2.0)) throw ConfigError("pointwise triple needs p >= 2");
      expected = exponent;
      break;
  }
  if (std::fabs(alpha - expected) > 1e-12)
    throw ConfigError("triple " + to_string(kind) + ": alpha must be " + std::to_string(expected));
}

// ---------------------------------------------------------------- norms

namespace {

void require_valid(const Field& v) { v.require_finite("norm"); }

double sum_abs_pow(std::span<const double> v, double p) {
  double s = 0.0;
  if (p == 2.0) return kernels::sum_squares(v);
  for (double x : v) s += std::pow(std::fabs(x), p);
  return s;
}

}  // namespace

double lp_norm(const Field& v, double p) {
  require_valid(v);
  const double h = v.grid().spacing();
  const double s = h * sum_abs_pow(v.values(), p);
  return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

double gradient_lp_norm(const Field& v, double p) {
  require_valid(v);
  const double h = v.grid().spacing();
  const auto vals = v.values();
  if (p == 2.0) return std::sqrt(kernels::edge_diff_squares(vals) / h);
  const std::size_t n = vals.size();
  double s = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double left = i > 0 ? vals[i - 1] : 0.0;
    const double right = i < n ? vals[i] : 0.0;
    s += std::pow(std::fabs((right - left) / h), p);
  }
  return std::pow(h * s, 1.0 / p);
}

double l2_inner(const Field& a, const Field& b) {
  require_same_grid(a, b);
  return a.grid().spacing() * kernels::dot(a.values(), b.values());
}

double discrete_l2(std::span<const double> v) { return std::sqrt(kernels::sum_squares(v)); }

Field dirichlet_laplacian(const Field& v) {
  Field out(v.grid());
  const double h = v.grid().spacing();
  kernels::laplacian(v.values(), out.values(), 1.0 / (h * h));
  return out;
}

Field inverse_dirichlet_laplacian(const Field& f) {
  f.require_finite("inverse_dirichlet_laplacian");
  const std::size_t n = f.size();
  const double h = f.grid().spacing();
  const double inv_h2 = 1.0 / (h * h);
  Tridiagonal m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.diag[i] = 2.0 * inv_h2;
    m.lower[i] = -inv_h2;
    m.upper[i] = -inv_h2;
  }
  return Field(f.grid(), solve_tridiagonal(m, f.values()));
}

double inner_H(const Field& a, const Field& b, const TripleSpec& triple) {
  require_same_grid(a, b);
  if (triple.kind == TripleKind::PME) return l2_inner(inverse_dirichlet_laplacian(a), b);
  return l2_inner(a, b);
}

double norm_H(const Field& v, const TripleSpec& triple) {
  require_valid(v);
  if (triple.kind == TripleKind::PME) {
    const double q = l2_inner(inverse_dirichlet_laplacian(v), v);
    return std::sqrt(std::fmax(q, 0.0));
  }
  return lp_norm(v, 2.0);
}

double norm_V(const Field& v, const TripleSpec& triple) {
  switch (triple.kind) {
    case TripleKind::RDE: {
      const double g = gradient_lp_norm(v, 2.0);
      const double l = lp_norm(v, 2.0);
      return std::sqrt(g * g + l * l);
    }
    case TripleKind::PLE: {
      const double p = triple.exponent;
      const double g = gradient_lp_norm(v, p);
      const double l = lp_norm(v, p);
      return std::pow(std::pow(g, p) + std::pow(l, p), 1.0 / p);
    }
    case TripleKind::PME: return lp_norm(v, triple.exponent + 1.0);
    case TripleKind::POINTWISE: return lp_norm(v, triple.exponent);
  }
  return 0.0;
}

double norm_S(const Field& v, const TripleSpec& triple) {
  switch (triple.kind) {
    case TripleKind::RDE: return gradient_lp_norm(v, 2.0);
    case TripleKind::PLE: {
      const double g = gradient_lp_norm(v, 2.0);
      const double l = lp_norm(v, 2.0);
      return std::sqrt(g * g + l * l);
    }
    case TripleKind::PME:
    case TripleKind::POINTWISE: return lp_norm(v, 2.0);
  }
  return 0.0;
}

double dual_pairing(const Field& fstar, const Field& v, const TripleSpec& /*triple*/) {
  require_same_grid(fstar, v);
  fstar.require_finite("dual_pairing");
  v.require_finite("dual_pairing");
  return l2_inner(fstar, v);
}

}  // namespace af
