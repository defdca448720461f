#include "attractor_forge/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace af::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

double edge_diff_squares_avx2(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 5 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v + i + 1), _mm256_loadu_pd(v + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i + 1 < n; ++i) {
    const double d = v[i + 1] - v[i];
    s += d * d;
  }
  return s + v[0] * v[0] + v[n - 1] * v[n - 1];
}

void laplacian_avx2(const double* v, double* out, std::size_t n, double scale) {
  if (n < 3) {
    scalar_table().laplacian(v, out, n, scale);
    return;
  }
  out[0] = scale * (-2.0 * v[0] + v[1]);
  const __m256d two = _mm256_set1_pd(-2.0);
  const __m256d sc = _mm256_set1_pd(scale);
  std::size_t i = 1;
  for (; i + 4 < n; i += 4) {
    const __m256d l = _mm256_loadu_pd(v + i - 1);
    const __m256d c = _mm256_loadu_pd(v + i);
    const __m256d r = _mm256_loadu_pd(v + i + 1);
    const __m256d s = _mm256_fmadd_pd(two, c, _mm256_add_pd(l, r));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(sc, s));
  }
  for (; i + 1 < n; ++i) out[i] = scale * (v[i - 1] - 2.0 * v[i] + v[i + 1]);
  out[n - 1] = scale * (v[n - 2] - 2.0 * v[n - 1]);
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

double max_abs_avx2(const double* a, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(a + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i]));
  return r;
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{
      "avx2",         dot_avx2,  sum_squares_avx2, edge_diff_squares_avx2,
      laplacian_avx2, axpy_avx2, max_abs_avx2,
  };
  return table;
}

}  // namespace af::kernels
