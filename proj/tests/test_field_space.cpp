#include <doctest.h>

#include <cmath>
#include <numbers>

#include "attractor_forge/errors.hpp"
#include "attractor_forge/field_space.hpp"
#include "attractor_forge/random.hpp"

using namespace af;
using std::numbers::pi;

TEST_CASE("grid geometry") {
  SpatialGrid g(9, 1.0);
  CHECK(g.spacing() == doctest::Approx(0.1));
  CHECK(g.node(0) == doctest::Approx(0.1));
  CHECK(g.node(8) == doctest::Approx(0.9));
  CHECK(g.measure() == doctest::Approx(0.9));
  CHECK_THROWS_AS(SpatialGrid(1, 1.0), ConfigError);
  CHECK_THROWS_AS(SpatialGrid(4, -1.0), ConfigError);
  // scalar grid: unit total weight, so constants behave like numbers
  CHECK(SpatialGrid::scalar().measure() == doctest::Approx(1.0));
}

TEST_CASE("discrete eigenvalues match the stencil") {
  const SpatialGrid g(50, 1.0);
  for (std::size_t k : {1u, 2u, 7u}) {
    const Field e = Field::mode(g, k);
    const Field lap = dirichlet_laplacian(e);
    // the sine vectors are exact eigenvectors of the 3-point stencil
    for (std::size_t i = 0; i < g.n_interior(); ++i)
      CHECK(lap[i] == doctest::Approx(-g.eigenvalue(k) * e[i]).epsilon(1e-10).scale(1.0));
  }
  const double h = g.spacing();
  CHECK(g.principal_eigenvalue() ==
        doctest::Approx(4.0 * std::pow(std::sin(pi * h / 2.0), 2) / (h * h)));
}

TEST_CASE("constant field norms approach the continuum value") {
  for (std::size_t n : {100u, 1000u}) {
    const SpatialGrid g(n, 1.0);
    const Field one = Field::constant(g, 1.0);
    const double h = g.spacing();
    CHECK(norm_H(one, TripleSpec::rde()) == doctest::Approx(1.0).epsilon(h));
    CHECK(lp_norm(one, 3.0) == doctest::Approx(1.0).epsilon(h));
  }
}

TEST_CASE("V norm of x(1-x) against analytic integrals") {
  // int (1-2x)^2 = 1/3, int x^2(1-x)^2 = 1/30
  const double exact = std::sqrt(1.0 / 3.0 + 1.0 / 30.0);
  double prev_err = 0.0;
  for (std::size_t n : {50u, 100u, 200u, 400u}) {
    const SpatialGrid g(n, 1.0);
    const Field v = Field::sample(g, [](double x) { return x * (1.0 - x); });
    const double err = std::abs(norm_V(v, TripleSpec::rde()) - exact);
    CHECK(err < 5.0 * g.spacing() * g.spacing());
    if (prev_err > 0.0) CHECK(std::log2(prev_err / err) > 1.9);
    prev_err = err;
  }
}

TEST_CASE("S norm of sin(2 pi x) in the RDE triple") {
  // |grad sin(2 pi x)|^2 integrates to 2 pi^2
  const SpatialGrid g(400, 1.0);
  const Field v = Field::sample(g, [](double x) { return std::sin(2 * pi * x); });
  CHECK(norm_S(v, TripleSpec::rde()) == doctest::Approx(std::sqrt(2.0) * pi).epsilon(1e-3));
}

TEST_CASE("inverse Laplacian residual") {
  const SpatialGrid g(120, 2.0);
  Rng rng = derived_rng(3, {});
  std::normal_distribution<double> nd;
  Field f(g);
  for (std::size_t i = 0; i < g.n_interior(); ++i) f[i] = nd(rng);
  const Field u = inverse_dirichlet_laplacian(f);
  Field r = -dirichlet_laplacian(u);
  r -= f;
  CHECK(discrete_l2(r.values()) <= 1e-12 * discrete_l2(f.values()) * 1e3);
}

TEST_CASE("PME pivot norm is the discrete H^-1 norm") {
  const SpatialGrid g(64, 1.0);
  const auto t = TripleSpec::pme(3.0);
  const Field e = Field::mode(g, 2);
  // |e_k|_{H^-1}^2 = |e_k|_{L2}^2 / mu_k
  const double l2sq = std::pow(lp_norm(e, 2.0), 2);
  CHECK(std::pow(norm_H(e, t), 2) == doctest::Approx(l2sq / g.eigenvalue(2)).epsilon(1e-12));
  CHECK(inner_H(e, e, t) == doctest::Approx(std::pow(norm_H(e, t), 2)).epsilon(1e-12));
}

TEST_CASE("pairing and errors") {
  const SpatialGrid g(30, 1.0);
  const Field v = Field::sample(g, [](double x) { return std::cos(3 * x); });
  CHECK(dual_pairing(v, v, TripleSpec::rde()) ==
        doctest::Approx(std::pow(norm_H(v, TripleSpec::rde()), 2)).epsilon(1e-12));

  Field bad = v;
  bad[7] = std::nan("");
  CHECK_THROWS_AS(norm_H(bad, TripleSpec::rde()), InvalidFieldError);
  const Field other(SpatialGrid(31, 1.0));
  CHECK_THROWS_AS(l2_inner(v, other), GridMismatchError);
  CHECK_THROWS_AS(Field(g, std::vector<double>(5, 0.0)), InvalidFieldError);
  CHECK_THROWS_AS((TripleSpec{TripleKind::PME, 3.0, 2.0}.validate()), ConfigError);
  CHECK_NOTHROW(TripleSpec::ple(3.0).validate());
}

TEST_CASE("triple embedding chain on random fields") {
  const SpatialGrid g(80, 1.0);
  Rng rng = derived_rng(11, {});
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& t : {TripleSpec::rde(), TripleSpec::pme(3.0), TripleSpec::ple(3.0)}) {
    double s_over_v = 0, h_over_s = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      Field v(g);
      for (std::size_t k = 1; k <= 10; ++k) v.add_scaled(u(rng) / double(k * k), Field::mode(g, k));
      s_over_v = std::max(s_over_v, norm_S(v, t) / norm_V(v, t));
      h_over_s = std::max(h_over_s, norm_H(v, t) / norm_S(v, t));
    }
    CAPTURE(to_string(t.kind));
    CHECK(std::isfinite(s_over_v));
    CHECK(std::isfinite(h_over_s));
    CHECK(h_over_s < 10.0);
  }
}
