#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "attractor_forge/drift.hpp"
#include "attractor_forge/errors.hpp"

using namespace af;
using std::numbers::pi;

namespace {

Field sine(const SpatialGrid& g, double k = 1.0, double a = 1.0) {
  return Field::sample(g, [=](double x) { return a * std::sin(k * pi * x / g.length()); });
}

}  // namespace

TEST_CASE("apply_drift examples") {
  const SpatialGrid g(99, 1.0);
  const double mu = g.principal_eigenvalue();
  const Field v = sine(g);
  const Field a = apply_drift(DriftSpec::reaction_diffusion(2, 0), v);
  for (std::size_t i = 0; i < g.n_interior(); ++i)
    CHECK(a[i] == doctest::Approx(-(mu + 1.0) * v[i]).epsilon(1e-12).scale(mu + 1.0));

  const Field z = apply_drift(DriftSpec::porous_medium(3, 0), Field::zeros(g));
  CHECK(discrete_l2(z.values()) == 0.0);

  const Field c = apply_drift(DriftSpec::pointwise(4, 0), Field::constant(g, 2.0));
  for (std::size_t i = 0; i < g.n_interior(); ++i) CHECK(c[i] == -8.0);

  Field huge = Field::constant(g, 1e200);
  CHECK_THROWS_AS(apply_drift(DriftSpec::pointwise(4, 0), huge), NonFiniteError);
}

TEST_CASE("drift parameter validation") {
  CHECK_THROWS_AS(DriftSpec::pointwise(1.5, 0), ConfigError);
  CHECK_THROWS_AS(DriftSpec::porous_medium(1.0, 0), ConfigError);
  CHECK_THROWS_AS(DriftSpec::p_laplace(2.0, 2, 0, 0), ConfigError);
  CHECK_THROWS_AS(DriftSpec::p_laplace(3.0, 4, 0, 0), ConfigError);
  CHECK_THROWS_AS(DriftSpec::p_laplace(3.0, 2, -1, 0), ConfigError);
  CHECK_NOTHROW(DriftSpec::reaction_diffusion(1.0, 0));
}

TEST_CASE("linear RDE drift is additive") {
  const SpatialGrid g(64, 1.0);
  Rng rng = derived_rng(5, {});
  const FieldSampler s;
  const auto spec = DriftSpec::reaction_diffusion(2, -0.5);
  for (int i = 0; i < 20; ++i) {
    const Field v1 = s.draw(g, rng), v2 = s.draw(g, rng);
    Field diff = apply_drift(spec, v1 + v2);
    diff -= apply_drift(spec, v1);
    diff -= apply_drift(spec, v2);
    CHECK(discrete_l2(diff.values()) <= 1e-12 * (1.0 + discrete_l2(apply_drift(spec, v1).values())));
  }
}

TEST_CASE("Jacobian matches finite differences of the drift") {
  const SpatialGrid g(30, 1.0);
  Rng rng = derived_rng(8, {});
  const FieldSampler s;
  for (const auto& spec : {DriftSpec::pointwise(4, 0.3), DriftSpec::reaction_diffusion(3, -1),
                           DriftSpec::porous_medium(3, 0.2), DriftSpec::p_laplace(3, 2.5, 0.5, -0.2)}) {
    CAPTURE(to_string(spec.family));
    Field v = s.draw(g, rng);
    v += Field::constant(g, 0.3);  // keep away from the kinks at zero
    const Tridiagonal J = drift_jacobian(spec, v);
    Field dir = s.draw(g, rng);
    std::vector<double> jv(g.n_interior());
    J.multiply(dir.values(), jv);
    const double eps = 1e-6;
    Field fp = apply_drift(spec, v + eps * dir);
    Field fm = apply_drift(spec, v - (eps * dir));
    for (std::size_t i = 0; i < g.n_interior(); ++i) {
      const double fd = (fp[i] - fm[i]) / (2 * eps);
      CHECK(jv[i] == doctest::Approx(fd).epsilon(1e-5).scale(1.0 + std::abs(fd)));
    }
  }
}

TEST_CASE("powerlaw_gap examples") {
  const double one[] = {1.0}, zero[] = {0.0}, two[] = {2.0}, m1[] = {-1.0};
  auto [l1, r1] = powerlaw_gap(one, zero, 2.0);
  CHECK(l1 == doctest::Approx(1.0));
  CHECK(r1 == doctest::Approx(0.25));
  auto [l2, r2] = powerlaw_gap(one, one, 1.5);
  CHECK(l2 == 0.0);
  CHECK(r2 == 0.0);
  auto [l3, r3] = powerlaw_gap(two, m1, 1.0);
  CHECK(l3 == doctest::Approx(15.0));
  CHECK(r3 == doctest::Approx(13.5));
}

TEST_CASE("powerlaw gap holds on random vectors") {
  Rng rng = derived_rng(37, {});
  std::uniform_real_distribution<double> coord(-10, 10), rexp(0, 4);
  std::uniform_int_distribution<int> dim(1, 8);
  double worst = 0.0;
  for (int t = 0; t < 20000; ++t) {
    const int k = dim(rng);
    std::vector<double> a(k), b(k);
    for (int i = 0; i < k; ++i) { a[i] = coord(rng); b[i] = coord(rng); }
    auto [lhs, rhs] = powerlaw_gap(a, b, rexp(rng));
    worst = std::min(worst, (lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300));
  }
  CHECK(worst >= -1e-12);
}

TEST_CASE("Yosida operator acts spectrally on sine modes") {
  const SpatialGrid g(63, 1.0);
  for (std::size_t k : {1u, 3u}) {
    const double mu = g.eigenvalue(k);
    const Field e = Field::mode(g, k);
    for (std::size_t n : {1u, 10u, 1000u}) {
      const Field t = yosida_apply(n, e);
      const double factor = mu / (1.0 + mu / double(n));
      for (std::size_t i = 0; i < g.n_interior(); ++i)
        CHECK(t[i] == doctest::Approx(factor * e[i]).epsilon(1e-9).scale(1.0 + factor));
    }
  }
  CHECK(discrete_l2(yosida_apply(4, Field::zeros(g)).values()) == 0.0);
}

TEST_CASE("norm_n increases to the S norm") {
  const SpatialGrid g(63, 1.0);
  const Field v = sine(g);
  const double ns = norm_S(v, TripleSpec::rde());
  double prev = 0.0;
  for (std::size_t n = 1; n <= (1u << 20); n *= 2) {
    const double nn = norm_n(n, v, TripleSpec::rde());
    CHECK(nn >= prev - 1e-12);
    prev = nn;
  }
  // single eigenmode: the limit is exact and the gap closes like mu/n
  CHECK(prev == doctest::Approx(ns).epsilon(1e-4));
  CHECK(norm_n(3, Field::zeros(g), TripleSpec::rde()) == 0.0);

  Rng rng = derived_rng(2, {});
  const FieldSampler s;
  for (int i = 0; i < 100; ++i) {
    const Field w = s.draw(g, rng);
    double last = 0.0;
    for (std::size_t n : {1u, 2u, 4u, 8u, 16u, 32u, 64u, 128u, 256u}) {
      const double nn = norm_n(n, w, TripleSpec::pme(3));
      CHECK(nn >= last - 1e-12 * (1 + nn));
      last = nn;
    }
  }
}

TEST_CASE("dual norm estimate on the pointwise triple equals the conjugate norm") {
  const SpatialGrid g(40, 1.0);
  const auto spec = DriftSpec::pointwise(4, 0);
  const auto triple = TripleSpec::pointwise(4);
  Rng rng = derived_rng(9, {});
  const FieldSampler s;
  for (int i = 0; i < 5; ++i) {
    const Field v = s.draw(g, rng);
    const double exact = lp_norm(apply_drift(spec, v), 4.0 / 3.0);
    const double est = dual_norm_estimate(spec, triple, v, 1000, 100 + i);
    CHECK(est <= exact * (1 + 1e-12));
    CHECK(est >= 0.95 * exact);
  }
  CHECK(dual_norm_estimate(DriftSpec::reaction_diffusion(2, 0), TripleSpec::rde(),
                           Field::zeros(g), 50, 1) == 0.0);
}

TEST_CASE("dual ratio is invariant under rescaling the directions") {
  const SpatialGrid g(20, 1.0);
  Rng rng = derived_rng(4, {});
  const FieldSampler s;
  const Field gfield = s.draw(g, rng);
  std::vector<Field> dirs, scaled;
  for (int i = 0; i < 10; ++i) {
    dirs.push_back(s.draw(g, rng));
    scaled.push_back((3.7 + i) * dirs.back());
  }
  CHECK(dual_ratio_max(gfield, TripleSpec::rde(), dirs) ==
        doctest::Approx(dual_ratio_max(gfield, TripleSpec::rde(), scaled)).epsilon(1e-12));
}

TEST_CASE("certification of the structural conditions") {
  const SpatialGrid g(48, 1.0);
  CertifyOptions opt;
  opt.trials = 300;

  SUBCASE("PME strong monotonicity with lambda = 2^{1-r}") {
    const auto spec = DriftSpec::porous_medium(3, 0);
    opt.trials = 1000;
    const auto rep = certify(spec, spec.natural_triple(), g, ConditionId::H2Strong, opt);
    CHECK(rep.constants.lambda == doctest::Approx(0.25));
    CHECK(rep.constants.beta == 4.0);
    CHECK(rep.worst_margin >= 0.0);
    CHECK(rep.satisfied);
  }
  SUBCASE("RDE is dissipative: H2 with C = 0") {
    auto spec = DriftSpec::reaction_diffusion(2, 0);
    spec.C_override = 0.0;
    const auto rep = certify(spec, spec.natural_triple(), g, ConditionId::H2, opt);
    CHECK(rep.satisfied);
    CHECK(rep.estimated_constants.at("C_hat") <= 0.0);
  }
  SUBCASE("identical pairs give margin exactly zero") {
    for (const auto& spec : {DriftSpec::pointwise(4, 0.5), DriftSpec::porous_medium(2.5, -1)}) {
      opt.identical_pairs = true;
      auto s = spec;
      s.C_override = 0.0;
      const auto rep = certify(s, s.natural_triple(), g, ConditionId::H2, opt);
      CHECK(rep.worst_margin == 0.0);
    }
  }
  SUBCASE("coercivity constants for all families") {
    for (const auto& spec : {DriftSpec::pointwise(4, -0.5), DriftSpec::reaction_diffusion(1.5, 0),
                             DriftSpec::porous_medium(3, 0), DriftSpec::p_laplace(3, 2, 1, -1)}) {
      CAPTURE(to_string(spec.family));
      const auto rep = certify(spec, spec.natural_triple(), g, ConditionId::H3, opt);
      CHECK(rep.satisfied);
      CHECK(rep.estimated_constants.at("delta_hat") > 0.0);
    }
  }
  SUBCASE("hemicontinuity, growth and Yosida conditions") {
    opt.trials = 40;
    for (const auto& spec : {DriftSpec::reaction_diffusion(2, 0), DriftSpec::porous_medium(3, 0),
                             DriftSpec::p_laplace(3, 2, 1, -1)}) {
      CAPTURE(to_string(spec.family));
      const auto t = spec.natural_triple();
      CHECK(certify(spec, t, g, ConditionId::H1, opt).satisfied);
      CHECK(certify(spec, t, g, ConditionId::H4, opt).satisfied);
      CHECK(certify(spec, t, g, ConditionId::H5Cond1, opt).satisfied);
      CHECK(certify(spec, t, g, ConditionId::H5Norms, opt).satisfied);
    }
  }
  SUBCASE("an injected wrong constant is detected") {
    auto spec = DriftSpec::porous_medium(3, 0);
    spec.lambda_override = 1e3;
    CHECK_FALSE(certify(spec, spec.natural_triple(), g, ConditionId::H2Strong, opt).satisfied);
  }
  SUBCASE("inapplicable conditions are configuration errors") {
    CHECK_THROWS_AS(certify(DriftSpec::reaction_diffusion(2, 1.0), TripleSpec::rde(), g,
                            ConditionId::H2Strong, opt),
                    ConfigError);
    CHECK_THROWS_AS(certify(DriftSpec::pointwise(4, 0), TripleSpec::pointwise(4), g,
                            ConditionId::H5Cond1, opt),
                    ConfigError);
    CHECK_THROWS_AS(condition_from_string("H9"), ConfigError);
    CHECK(condition_from_string("H2'") == ConditionId::H2Strong);
  }
  SUBCASE("certify reports are reproducible") {
    const auto spec = DriftSpec::p_laplace(3, 2, 1, -1);
    const auto a = certify(spec, spec.natural_triple(), g, ConditionId::H2Strong, opt);
    const auto b = certify(spec, spec.natural_triple(), g, ConditionId::H2Strong, opt);
    CHECK(a.worst_margin == b.worst_margin);
  }
}
