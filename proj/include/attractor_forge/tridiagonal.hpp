#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace af {

// Tridiagonal matrix: lower[i] couples row i to i-1 (lower[0] unused),
// upper[i] couples row i to i+1 (upper[n-1] unused).
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
  std::size_t size() const noexcept { return diag.size(); }

  // out = M x
  void multiply(std::span<const double> x, std::span<double> out) const;
};

// Thomas elimination without pivoting; intended for the diagonally dominant
// systems produced by the Dirichlet stencils. Throws InternalError on a zero
// pivot.
std::vector<double> solve_tridiagonal(const Tridiagonal& m, std::span<const double> rhs);

}  // namespace af
