#include "attractor_forge/kernels.hpp"

#include <cmath>

namespace af::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double edge_diff_squares_scalar(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  double s = v[0] * v[0] + v[n - 1] * v[n - 1];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = v[i + 1] - v[i];
    s += d * d;
  }
  return s;
}

void laplacian_scalar(const double* v, double* out, std::size_t n, double scale) {
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? v[i - 1] : 0.0;
    const double right = i + 1 < n ? v[i + 1] : 0.0;
    out[i] = scale * (left - 2.0 * v[i] + right);
  }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double max_abs_scalar(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i]));
  return m;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",           dot_scalar, sum_squares_scalar, edge_diff_squares_scalar,
      laplacian_scalar,   axpy_scalar, max_abs_scalar,
  };
  return table;
}

}  // namespace af::kernels
