#pragma once

// Pullback experiments for the single-point random attractor: bundle
// diameters over a ladder of start times, the comparison ODE h' = -lambda h^{beta/2},
// contraction bound checks, absorbing radii and the random fixed point.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "attractor_forge/drift.hpp"
#include "attractor_forge/flow.hpp"

namespace af {

enum class RateKind { Polynomial, Exponential };

std::string to_string(RateKind k);

struct RateFit {
  RateKind kind = RateKind::Exponential;
  // Polynomial: log-log slope of diameter^2 against elapsed time.
  // Exponential: lambda_hat with diameter^2 ~ exp(-lambda_hat * elapsed).
  double value = 0.0;
  std::size_t points = 0;
  bool ok = false;
};

struct PullbackResult {
  std::vector<double> s_list;
  double eval_time = 0.0;
  std::vector<std::vector<Field>> endpoints;  // [s index][member]
  std::vector<double> diameters;              // max pairwise H distance per s
  std::vector<double> bound_values;           // comparison bound on diameter^2 per s
  Field eta0{SpatialGrid::unit(2)};  // replaced by the run
  double eta0_error = 0.0;
  RateFit rate;
  std::size_t bound_violations = 0;
};

std::vector<double> default_pullback_ladder();

// Diameters are compared against the backward Euler comparison bound started
// from the initial bundle diameter, with a 10% allowance; exceedances are
// counted in bound_violations.
PullbackResult pullback_run(const DriftSpec& drift, const TripleSpec& triple,
                            const NoisePath& noise, const std::vector<Field>& bundle,
                            const std::vector<double>& s_list, double eval_time,
                            const SolverConfig& cfg, const DriftConstants& constants);

// h0 = +infinity gives the start-independent bound for beta > 2.
double comparison_oracle(double h0, double lambda, double beta, double elapsed);

// The same comparison for the backward Euler scheme: with x = sqrt(h),
// x_{k+1} + (dt lambda / 2) x_{k+1}^{beta-1} = x_k over the solver's steps
// (full steps of dt, then a truncated last one). Dominates the continuous
// bound and converges to it as dt -> 0.
double discrete_comparison_bound(double h0, double lambda, double beta, double dt, double elapsed);

struct BoundSample {
  double t = 0.0;
  double dist_sq = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct PolynomialBoundReport {
  std::vector<BoundSample> samples;
  double max_ratio = 0.0;
};

PolynomialBoundReport verify_polynomial_bound(const DriftSpec& drift, const TripleSpec& triple,
                                              const NoisePath& noise, const Field& x,
                                              const Field& y, double s1, double s2,
                                              const std::vector<double>& sample_times,
                                              const SolverConfig& cfg,
                                              const DriftConstants& constants);

struct ExponentialBoundReport {
  std::vector<BoundSample> samples;
  double lambda_hat = 0.0;
  bool fit_skipped = false;
  double eta = 0.0;
  double K_eta = 0.0;
  bool satisfied = false;  // lambda_hat >= certified lambda - tolerance
};

ExponentialBoundReport verify_exponential_bound(const DriftSpec& drift, const TripleSpec& triple,
                                                const NoisePath& noise, const Field& x,
                                                const Field& y, double eta_margin, double s1,
                                                double s2, const std::vector<double>& sample_times,
                                                const SolverConfig& cfg,
                                                const DriftConstants& constants,
                                                double tolerance = 0.02);

struct RadiusEstimate {
  std::string which;
  double value = 0.0;     // the radius (not squared)
  double value_sq = 0.0;
  double truncation_horizon = 0.0;
  double tail_bound = 0.0;
  double C2 = 0.0;        // r2 only: fitted affine constant
  DriftConstants constants;
};

RadiusEstimate absorbing_radius_r1(const NoisePath& noise, const TripleSpec& triple,
                                   const DriftConstants& constants, double truncation_horizon);

RadiusEstimate absorbing_radius_r2(const DriftSpec& drift, const TripleSpec& triple,
                                   const NoisePath& noise, const std::vector<Field>& x_samples,
                                   const SolverConfig& cfg,
                                   const std::vector<double>& s_ladder = {-2.0, -5.0, -10.0, -20.0});

// || phi(t, w) eta0(w) - eta0(theta_t w) ||_H with both fixed-point estimates
// pulled back from `depth` starting at x0 (zero field when empty).
double random_fixed_point_check(const DriftSpec& drift, const TripleSpec& triple,
                                const NoisePath& noise, double t_shift, const SolverConfig& cfg,
                                double depth = -40.0);

// Columns s,t,member_id,dist_H_sq,bound_value,ratio plus a '#' summary block.
void write_pullback_csv(std::ostream& os, const PullbackResult& res, const TripleSpec& triple);

}  // namespace af
