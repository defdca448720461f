#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "attractor_forge/kernels.hpp"

using namespace af::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// |a - b| relative to the magnitude of the summands, not of the result.
void check_close(double a, double b, double magnitude) {
  CHECK(std::abs(a - b) <= 1e-13 * (1.0 + magnitude));
}

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(scalar_table().name == "scalar");
  CHECK(select("scalar"));
  CHECK(active().name == "scalar");
  CHECK_FALSE(select("no-such-variant"));
}

TEST_CASE("scalar kernels match direct loops") {
  const auto a = random_vector(37, 1), b = random_vector(37, 2);
  const auto& k = scalar_table();
  double dot = 0, ss = 0, mx = 0, ed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    ss += a[i] * a[i];
    mx = std::max(mx, std::abs(a[i]));
  }
  for (std::size_t i = 0; i <= a.size(); ++i) {
    const double l = i ? a[i - 1] : 0.0, r = i < a.size() ? a[i] : 0.0;
    ed += (r - l) * (r - l);
  }
  CHECK(k.dot(a.data(), b.data(), a.size()) == doctest::Approx(dot).epsilon(1e-14));
  CHECK(k.sum_squares(a.data(), a.size()) == doctest::Approx(ss).epsilon(1e-14));
  CHECK(k.edge_diff_squares(a.data(), a.size()) == doctest::Approx(ed).epsilon(1e-14));
  CHECK(k.max_abs(a.data(), a.size()) == mx);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const KernelTable* v = avx2_table();
  if (!v) {
    MESSAGE("AVX2 variant unavailable on this machine; equivalence not exercised");
    return;
  }
  const auto& s = scalar_table();
  // lengths straddle the 4-wide vector boundary and the remainder loop
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 64u, 100u, 257u, 1000u}) {
    CAPTURE(n);
    const auto a = random_vector(n, 10 + n), b = random_vector(n, 20 + n);
    double mag = 0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]) + a[i] * a[i];
    check_close(v->dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n), mag);
    check_close(v->sum_squares(a.data(), n), s.sum_squares(a.data(), n), mag);
    check_close(v->edge_diff_squares(a.data(), n), s.edge_diff_squares(a.data(), n), 4 * mag);
    CHECK(v->max_abs(a.data(), n) == s.max_abs(a.data(), n));

    std::vector<double> o1(n), o2(n);
    s.laplacian(a.data(), o1.data(), n, 3.5);
    v->laplacian(a.data(), o2.data(), n, 3.5);
    for (std::size_t i = 0; i < n; ++i) check_close(o1[i], o2[i], 30.0);

    auto y1 = b, y2 = b;
    s.axpy(-0.7, a.data(), y1.data(), n);
    v->axpy(-0.7, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) check_close(y1[i], y2[i], 4.0);
  }
  CHECK(select("avx2"));
  CHECK(active().name == "avx2");
  select("scalar");
}
