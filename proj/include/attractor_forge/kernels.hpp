#pragma once

// Data-parallel inner loops shared by the field, drift and flow modules.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2/FMA variant. The active table is chosen once at startup from CPUID
// and can be overridden (tests pin both variants and compare them).

#include <cstddef>
#include <span>
#include <string_view>

namespace af::kernels {

struct KernelTable {
  std::string_view name;

  // sum_i a_i * b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a_i^2
  double (*sum_squares)(const double* a, std::size_t n);
  // sum_{i=0}^{n} (v_{i+1} - v_i)^2 with v_0 = v_{n+1} = 0 (Dirichlet edges)
  double (*edge_diff_squares)(const double* v, std::size_t n);
  // out_i = scale * (v_{i-1} - 2 v_i + v_{i+1}), zero boundary values
  void (*laplacian)(const double* v, double* out, std::size_t n, double scale);
  // y_i += a * x_i
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // max_i |a_i|
  double (*max_abs)(const double* a, std::size_t n);
};

const KernelTable& scalar_table();
// Null when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();

const KernelTable& active();
// Forces a variant ("scalar" or "avx2"); returns false if unavailable.
bool select(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sum_squares(std::span<const double> a) {
  return active().sum_squares(a.data(), a.size());
}
inline double edge_diff_squares(std::span<const double> v) {
  return active().edge_diff_squares(v.data(), v.size());
}
inline void laplacian(std::span<const double> v, std::span<double> out, double scale) {
  active().laplacian(v.data(), out.data(), v.size(), scale);
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline double max_abs(std::span<const double> a) {
  return active().max_abs(a.data(), a.size());
}

}  // namespace af::kernels
