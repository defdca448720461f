#pragma once

// Discretization of the domain (0, L) with homogeneous Dirichlet data and the
// norms/pairings of the four Gelfand triples used by the drift families.
//
// Conventions:
//   * interior nodes x_i = i*h, i = 1..n, h = L/(n+1); boundary values are 0
//   * L^p integrals use midpoint weights h * sum_i
//   * gradients use forward differences over the n+1 cells, boundary included
//   * the discrete Laplacian is the standard 3-point stencil

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace af {

class SpatialGrid {
public:
  SpatialGrid(std::size_t n_interior, double length);

  static SpatialGrid unit(std::size_t n_interior) { return SpatialGrid(n_interior, 1.0); }
  // Two nodes with unit total quadrature weight: a constant field behaves as a
  // scalar under every L^p norm. Used for pointwise drifts treated as ODEs.
  static SpatialGrid scalar() { return SpatialGrid(2, 1.5); }

  std::size_t n_interior() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return spacing_; }
  // Total quadrature weight n*h.
  double measure() const noexcept { return static_cast<double>(n_) * spacing_; }
  double node(std::size_t i) const noexcept { return static_cast<double>(i + 1) * spacing_; }
  // Smallest eigenvalue of the discrete Dirichlet operator -Delta_h.
  double principal_eigenvalue() const noexcept;
  // k-th eigenvalue (k >= 1) of -Delta_h.
  double eigenvalue(std::size_t k) const noexcept;

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) noexcept {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

private:
  std::size_t n_;
  double length_;
  double spacing_;
};

class Field {
public:
  explicit Field(const SpatialGrid& grid);
  Field(const SpatialGrid& grid, std::vector<double> values);

  static Field zeros(const SpatialGrid& grid) { return Field(grid); }
  static Field constant(const SpatialGrid& grid, double c);
  static Field sample(const SpatialGrid& grid, const std::function<double(double)>& f);
  // sqrt(2) sin(k pi x / L)
  static Field mode(const SpatialGrid& grid, std::size_t k);

  const SpatialGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  bool all_finite() const noexcept;
  // Throws InvalidFieldError naming the first non-finite node.
  void require_finite(const char* context) const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double c);
  // this += a * o
  Field& add_scaled(double a, const Field& o);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double c, Field a) { return a *= c; }
  friend Field operator-(Field a) { return a *= -1.0; }

private:
  SpatialGrid grid_;
  std::vector<double> values_;
};

void require_same_grid(const Field& a, const Field& b);

enum class TripleKind { RDE, PME, PLE, POINTWISE };

std::string to_string(TripleKind kind);
TripleKind triple_kind_from_string(const std::string& s);

// Which Gelfand triple V c H c V* the fields live in.
//   RDE:       W^{1,2}_0 c L^2 c W^{-1,2},      alpha = 2,      S = W^{1,2}_0
//   PME:       L^{r+1} c W^{-1,2}_0 c L^{(r+1)'}, alpha = r + 1, S = L^2
//   PLE:       W^{1,p} c L^2 c (W^{1,p})*,      alpha = p,      S = W^{1,2}
//   POINTWISE: L^p c L^2 c L^{p'},              alpha = p,      S = L^2
struct TripleSpec {
  TripleKind kind = TripleKind::RDE;
  double exponent = 2.0;  // p for PLE/POINTWISE, r for PME, unused for RDE
  double alpha = 2.0;

  static TripleSpec rde() { return {TripleKind::RDE, 2.0, 2.0}; }
  static TripleSpec pme(double r) { return {TripleKind::PME, r, r + 1.0}; }
  static TripleSpec ple(double p) { return {TripleKind::PLE, p, p}; }
  static TripleSpec pointwise(double p) { return {TripleKind::POINTWISE, p, p}; }

  // Throws ConfigError if alpha does not match the kind's convention.
  void validate() const;
  friend bool operator==(const TripleSpec&, const TripleSpec&) = default;
};

// (h sum |v_i|^p)^{1/p}
double lp_norm(const Field& v, double p);
// (h sum_{cells} |D+ v|^p)^{1/p}, Dirichlet edges included
double gradient_lp_norm(const Field& v, double p);
// h sum a_i b_i
double l2_inner(const Field& a, const Field& b);

double norm_H(const Field& v, const TripleSpec& triple);
double norm_V(const Field& v, const TripleSpec& triple);
double norm_S(const Field& v, const TripleSpec& triple);
// <a, b>_H in the triple's pivot space (L^2 or discrete H^{-1}).
double inner_H(const Field& a, const Field& b, const TripleSpec& triple);

// Solves -Delta_h u = f with zero boundary values.
Field inverse_dirichlet_laplacian(const Field& f);
// Delta_h v (3-point stencil, zero boundary values).
Field dirichlet_laplacian(const Field& v);

// Quadrature of the integral of fstar * v. The discrete representation makes
// the V*-V duality the L^2 pairing for every triple.
double dual_pairing(const Field& fstar, const Field& v, const TripleSpec& triple);

// Euclidean 2-norm of the raw node values (solver residual norm).
double discrete_l2(std::span<const double> v);

}  // namespace af
