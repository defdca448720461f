#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "attractor_forge/attractor.hpp"
#include "attractor_forge/errors.hpp"

using namespace af;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// RK4 for h' = -lambda h^{beta/2}
double integrate_comparison(double h0, double lambda, double beta, double T) {
  const int steps = 20000;
  const double dt = T / steps;
  auto f = [&](double h) { return -lambda * std::pow(std::max(h, 0.0), beta / 2); };
  double h = h0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(h), k2 = f(h + dt / 2 * k1), k3 = f(h + dt / 2 * k2), k4 = f(h + dt * k3);
    h += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return h;
}

SolverConfig solver(double dt) {
  SolverConfig c;
  c.dt = dt;
  c.newton_tol = 1e-13;
  return c;
}

std::vector<Field> constant_bundle(const SpatialGrid& g, std::initializer_list<double> values) {
  std::vector<Field> out;
  for (double v : values) out.push_back(Field::constant(g, v));
  return out;
}

}  // namespace

TEST_CASE("comparison oracle solves the comparison ODE") {
  for (double beta : {2.0, 3.0, 4.0, 6.0}) {
    for (double h0 : {0.5, 4.0}) {
      CAPTURE(beta);
      CAPTURE(h0);
      CHECK(comparison_oracle(h0, 0.7, beta, 3.0) ==
            doctest::Approx(integrate_comparison(h0, 0.7, beta, 3.0)).epsilon(1e-8));
    }
  }
  CHECK(comparison_oracle(2.0, 1.0, 2.0, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)));
  // start-independent bound for beta = 4: 1/(lambda t)
  CHECK(comparison_oracle(kInf, 0.5, 4.0, 8.0) == doctest::Approx(0.25));
  CHECK(comparison_oracle(kInf, 0.5, 4.0, 8.0) >= comparison_oracle(1e6, 0.5, 4.0, 8.0));
  CHECK(std::isinf(comparison_oracle(kInf, 1.0, 2.0, 1.0)));
  CHECK_THROWS_AS(comparison_oracle(1.0, 1.0, 1.5, 1.0), DomainError);
  CHECK_THROWS_AS(comparison_oracle(1.0, 0.0, 2.0, 1.0), DomainError);
}

TEST_CASE("linear pullback matches the backward Euler contraction") {
  const SpatialGrid g = SpatialGrid::scalar();
  const auto drift = DriftSpec::pointwise(2, 0);
  const auto triple = drift.natural_triple();
  const NoisePath noise = gen_path(NoiseSpec::qwiener({1.0}), g, -45.0, 1.0, 1e-3, 3);
  const auto k = resolve_constants(drift, g);
  const auto res = pullback_run(drift, triple, noise, constant_bundle(g, {-1.0, 0.5, 1.0}),
                                {-1, -2, -5, -10}, 0.0, solver(1e-3), k);
  REQUIRE(res.diameters.size() == 4);
  const double step_rate = 2.0 * std::log1p(1e-3) / 1e-3;
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(res.diameters[i] == doctest::Approx(2.0 * std::exp(0.5 * step_rate * res.s_list[i])).epsilon(1e-8));
  CHECK(res.rate.kind == RateKind::Exponential);
  CHECK(res.rate.points == 4);
  CHECK(res.rate.value == doctest::Approx(step_rate).epsilon(1e-6));
  CHECK(res.bound_violations == 0);
  // eta0 comes from the deepest start
  CHECK(discrete_l2((res.eta0 - res.endpoints[3][0]).values()) == 0.0);
}

TEST_CASE("polynomial pullback rate for the cubic drift") {
  const SpatialGrid g = SpatialGrid::scalar();
  const auto drift = DriftSpec::pointwise(4, 0);
  const NoisePath noise = gen_path(NoiseSpec::zero(), g, -45.0, 0.0, 1e-3, 1);
  const auto k = resolve_constants(drift, g);
  const auto res = pullback_run(drift, drift.natural_triple(), noise, constant_bundle(g, {-10.0, 10.0}),
                                default_pullback_ladder(), 0.0, solver(1e-2), k);
  CHECK(res.rate.kind == RateKind::Polynomial);
  CHECK(res.rate.value == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(res.bound_violations == 0);

  auto wrong = drift;
  wrong.lambda_override = 8.0 * k.lambda;
  const auto bad = pullback_run(drift, drift.natural_triple(), noise, constant_bundle(g, {-10.0, 10.0}),
                                default_pullback_ladder(), 0.0, solver(1e-2), resolve_constants(wrong, g));
  CHECK(bad.bound_violations > 0);
}

TEST_CASE("pullback argument errors") {
  const SpatialGrid g(8, 1.0);
  const auto drift = DriftSpec::reaction_diffusion(2, 0);
  const NoisePath noise = gen_path(NoiseSpec::zero(), g, -5.0, 0.0, 0.01, 1);
  const auto k = resolve_constants(drift, g);
  const auto bundle = std::vector<Field>{Field::mode(g, 1)};
  CHECK_THROWS_AS(pullback_run(drift, TripleSpec::rde(), noise, bundle, {-10}, 0.0, solver(0.01), k), RangeError);
  CHECK_THROWS_AS(pullback_run(drift, TripleSpec::rde(), noise, bundle, {-1}, -2.0, solver(0.01), k), ConfigError);
  CHECK_THROWS_AS(pullback_run(drift, TripleSpec::rde(), noise, {}, {-1}, 0.0, solver(0.01), k), ConfigError);
}

TEST_CASE("sharp polynomial bound for antipodal starts") {
  // (u^3 - v^3)(u - v) >= |u - v|^4 / 4 with equality at u = -v, so the
  // bound 2/t is nearly attained from +-10
  const SpatialGrid g = SpatialGrid::scalar();
  const auto drift = DriftSpec::pointwise(4, 0);
  const NoisePath noise = gen_path(NoiseSpec::zero(), g, 0.0, 60.0, 1e-3, 1);
  const auto k = resolve_constants(drift, g);
  CHECK(k.lambda == doctest::Approx(0.5));
  const auto rep = verify_polynomial_bound(drift, drift.natural_triple(), noise, Field::constant(g, 10.0),
                                           Field::constant(g, -10.0), 0.0, 0.0, {1.0, 10.0, 50.0},
                                           solver(1e-3), k);
  REQUIRE(rep.samples.size() == 3);
  CHECK(rep.samples[2].bound == doctest::Approx(2.0 / 50.0));
  CHECK(rep.max_ratio <= 1.01);
  CHECK(rep.samples[2].ratio >= 0.95);

  auto doubled = drift;
  doubled.lambda_override = 2.0 * k.lambda;
  const auto bad = verify_polynomial_bound(drift, drift.natural_triple(), noise, Field::constant(g, 10.0),
                                           Field::constant(g, -10.0), 0.0, 0.0, {1.0, 10.0, 50.0},
                                           solver(1e-2), resolve_constants(doubled, g));
  CHECK(bad.max_ratio > 1.1);
  CHECK_THROWS_AS(verify_polynomial_bound(drift, drift.natural_triple(), noise, Field::constant(g, 1.0),
                                          Field::constant(g, 0.0), 0.0, 1.0, {0.5}, solver(1e-2), k),
                  ConfigError);
}

TEST_CASE("exponential bound for the linear heat drift") {
  const SpatialGrid g(31, 1.0);
  const auto drift = DriftSpec::reaction_diffusion(2, 0);
  const NoisePath noise = gen_path(NoiseSpec::qwiener(NoiseSpec::default_weights()), g, -20.0, 1.0, 1e-4, 9);
  const auto k = resolve_constants(drift, g);
  const auto rep = verify_exponential_bound(drift, TripleSpec::rde(), noise, 2.0 * Field::mode(g, 1),
                                            Field::zeros(g), 0.1, 0.0, 0.0, {0.0, 0.1, 0.2, 0.4},
                                            solver(1e-4), k);
  CHECK_FALSE(rep.fit_skipped);
  // the difference is a single discrete mode: exact backward Euler rate
  const double mu = g.principal_eigenvalue() + 1.0;
  CHECK(rep.lambda_hat == doctest::Approx(2.0 * std::log1p(1e-4 * mu) / 1e-4).epsilon(1e-6));
  CHECK(rep.satisfied);
  CHECK(rep.eta == doctest::Approx(0.9 * k.lambda));
  CHECK(rep.K_eta > 0.0);
  CHECK(std::isfinite(rep.K_eta));

  auto wrong = drift;
  wrong.lambda_override = 1.5 * k.lambda;
  CHECK_FALSE(verify_exponential_bound(drift, TripleSpec::rde(), noise, 2.0 * Field::mode(g, 1),
                                       Field::zeros(g), 0.1, 0.0, 0.0, {0.0, 0.1, 0.2, 0.4},
                                       solver(1e-4), resolve_constants(wrong, g))
                  .satisfied);
  CHECK_THROWS_AS(verify_exponential_bound(drift, TripleSpec::rde(), noise, Field::zeros(g),
                                           Field::zeros(g), 1.5, 0.0, 0.0, {0.1}, solver(1e-4), k),
                  ConfigError);
}

TEST_CASE("absorbing radius r1 without noise") {
  const SpatialGrid g(8, 1.0);
  const NoisePath zero = gen_path(NoiseSpec::zero(), g, -30.0, 0.0, 1e-3, 1);
  DriftConstants k;
  k.alpha = 2;
  k.delta = 1;
  k.C = 3;
  k.lambda = 0.8;
  const auto e = absorbing_radius_r1(zero, TripleSpec::rde(), k, -30.0);
  // 2 + int_{-30}^{-1} e^{-lambda(-1-r)} 2C dr
  const double expect = 2.0 + 2.0 * k.C * (1.0 - std::exp(-k.lambda * 29.0)) / k.lambda;
  CHECK(e.value_sq == doctest::Approx(expect).epsilon(1e-6));
  CHECK(e.value == doctest::Approx(std::sqrt(expect)));
  CHECK(e.tail_bound > 0.0);
  CHECK(e.tail_bound < 1e-6);
  CHECK_THROWS_AS(absorbing_radius_r1(zero, TripleSpec::rde(), k, -0.5), ConfigError);
}

TEST_CASE("absorbing radius r2 and the random fixed point") {
  const SpatialGrid g(16, 1.0);
  const auto drift = DriftSpec::reaction_diffusion(3, 0);
  const NoisePath noise = gen_path(NoiseSpec::qwiener(NoiseSpec::default_weights()), g, -42.0, 3.0, 0.01, 2);
  std::vector<Field> xs{Field::mode(g, 1), -5.0 * Field::mode(g, 2)};
  const auto r2 = absorbing_radius_r2(drift, TripleSpec::rde(), noise, xs, solver(0.02));
  CHECK(r2.value > 0.0);
  CHECK(std::isfinite(r2.C2));
  CHECK(r2.truncation_horizon == -20.0);
  CHECK_THROWS_AS(absorbing_radius_r2(drift, TripleSpec::rde(), noise, xs, solver(0.02), {-1.0}), ConfigError);

  CHECK(random_fixed_point_check(drift, TripleSpec::rde(), noise, 1.5, solver(0.02)) < 1e-9);
  CHECK(random_fixed_point_check(drift, TripleSpec::rde(), noise, 0.0, solver(0.02)) == 0.0);
  CHECK_THROWS_AS(random_fixed_point_check(drift, TripleSpec::rde(), noise, -1.0, solver(0.02)), ConfigError);
}

TEST_CASE("pullback csv layout") {
  const SpatialGrid g(8, 1.0);
  const auto drift = DriftSpec::reaction_diffusion(2, 0);
  const NoisePath noise = gen_path(NoiseSpec::zero(), g, -3.0, 0.0, 0.01, 1);
  const auto res = pullback_run(drift, TripleSpec::rde(), noise, {Field::mode(g, 1), Field::zeros(g)},
                                {-1, -2}, 0.0, solver(0.01), resolve_constants(drift, g));
  std::ostringstream os;
  write_pullback_csv(os, res, TripleSpec::rde());
  const std::string text = os.str();
  CHECK(text.rfind("s,t,member_id,dist_H_sq,bound_value,ratio\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 + 2);
  CHECK(text.find("# rate_kind=exponential") != std::string::npos);
}

TEST_CASE("backward Euler comparison bound") {
  // beta = 2: (1 + dt lambda / 2)^{-2k}
  CHECK(discrete_comparison_bound(3.0, 2.0, 2.0, 0.1, 1.0) == doctest::Approx(3.0 * std::pow(1.1, -20.0)));
  // a truncated last step
  CHECK(discrete_comparison_bound(1.0, 2.0, 2.0, 0.1, 0.25) ==
        doctest::Approx(std::pow(1.1, -4.0) * std::pow(1.05, -2.0)));
  for (double beta : {2.0, 3.0, 4.0}) {
    CAPTURE(beta);
    const double cont = comparison_oracle(2.0, 0.8, beta, 5.0);
    double prev = kInf;
    for (double dt : {0.5, 0.1, 0.01, 0.001}) {
      const double d = discrete_comparison_bound(2.0, 0.8, beta, dt, 5.0);
      CHECK(d >= cont * (1 - 1e-12));
      CHECK(d <= prev);
      prev = d;
    }
    CHECK(prev == doctest::Approx(cont).epsilon(5e-3));
  }
  // one implicit step for beta = 4: x1 + a x1^3 = x0
  const double x1 = std::sqrt(discrete_comparison_bound(4.0, 1.0, 4.0, 0.5, 0.5));
  CHECK(x1 + 0.25 * x1 * x1 * x1 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("scalar linear distance ignores the noise") {
  const SpatialGrid g = SpatialGrid::scalar();
  const auto drift = DriftSpec::pointwise(2, 0);
  const auto k = resolve_constants(drift, g);
  const NoisePath noise = gen_path(NoiseSpec::fbm(0.3, {1.0}), g, 0.0, 3.0, 1e-3, 14);
  const auto rep = verify_exponential_bound(drift, drift.natural_triple(), noise, Field::constant(g, 1.5),
                                            Field::constant(g, 0.5), 0.1, 0.0, 0.0, {0.0, 1.0, 2.0, 3.0},
                                            solver(1e-3), k);
  for (const auto& s : rep.samples) CHECK(s.dist_sq == doctest::Approx(std::exp(-2.0 * s.t)).epsilon(4e-3));
  CHECK(rep.satisfied);

  const auto same = verify_exponential_bound(drift, drift.natural_triple(), noise, Field::constant(g, 1.5),
                                             Field::constant(g, 1.5), 0.1, 0.0, 0.0, {0.0, 1.0, 2.0}, solver(1e-3), k);
  CHECK(same.fit_skipped);
  for (const auto& s : same.samples) CHECK(s.dist_sq == 0.0);
}
