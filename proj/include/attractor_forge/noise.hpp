#pragma once

// Two-sided additive noise paths with stationary increments: Q-Wiener,
// fractional Brownian (circulant embedding), and finite-activity Levy
// (drift + Q-Wiener + compound Poisson). Plus the Wiener shift and the
// statistical validators for stationarity, growth and moment scaling.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "attractor_forge/field_space.hpp"
#include "attractor_forge/random.hpp"

namespace af {

enum class NoiseKind { Zero, QWiener, FBM, Levy };

std::string to_string(NoiseKind k);
NoiseKind noise_kind_from_string(const std::string& s);

enum class JumpLaw { Deterministic, Normal, Uniform };

std::string to_string(JumpLaw j);
JumpLaw jump_law_from_string(const std::string& s);

// Spatial modes e_k(x) = sqrt(2) sin(k pi x / L), k = 1..K.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::Zero;
  // lambda_k for k = 1..K (Gaussian part for QWiener/FBM/Levy)
  std::vector<double> mode_weights;
  double hurst = 0.5;

  // Levy: drift m = sum_k drift_modes[k-1] e_k, jumps amplitude * e_{jump_mode}
  std::vector<double> drift_modes;
  double jump_rate = 0.0;
  std::size_t jump_mode = 1;
  JumpLaw jump_law = JumpLaw::Deterministic;
  double jump_mean = 0.0;
  double jump_spread = 0.0;  // normal sd or uniform half-width

  static NoiseSpec zero() { return {}; }
  // lambda_k = scale * k^{-decay}
  static std::vector<double> power_weights(std::size_t modes, double decay, double scale = 1.0);
  static NoiseSpec qwiener(std::vector<double> weights);
  static NoiseSpec fbm(double hurst, std::vector<double> weights);
  static NoiseSpec levy(std::vector<double> drift_modes, std::vector<double> wiener_weights,
                        double jump_rate, std::size_t jump_mode, JumpLaw law, double jump_mean,
                        double jump_spread = 0.0);
  // Default mode weights k^{-8}, 8 modes.
  static std::vector<double> default_weights() { return power_weights(8, 8.0); }

  // Throws ConfigError: negative weights, weights decaying slower than
  // c k^{-6}, Hurst outside (0,1), infinite jump rate, ...
  void validate() const;
  double expected_jump() const;
  std::size_t mode_count() const;
};

struct NoisePath {
  NoiseSpec spec;
  std::uint64_t seed = 0;
  SpatialGrid grid = SpatialGrid::unit(2);
  double t_start = 0.0;
  double dt = 1.0;
  std::size_t count = 0;  // number of grid times
  bool cholesky_fallback = false;
  std::vector<double> data;  // count x n, row-major

  double t_end() const { return t_start + dt * static_cast<double>(count - 1); }
  double time(std::size_t i) const { return t_start + dt * static_cast<double>(i); }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * grid.n_interior(), grid.n_interior()};
  }
  Field at(std::size_t i) const;
  // Index of grid time t; throws AlignmentError off-grid, RangeError outside.
  std::size_t index_of(double t) const;
  Field value(double t) const { return at(index_of(t)); }
  bool contains(double t) const;
};

// Scalar fractional Brownian motion b(0) = 0, b(j dt), j = 0..steps, by exact
// circulant embedding of fractional Gaussian noise. Falls back to a
// covariance Cholesky factorization (<= 2048 steps) if the embedding is not
// positive semidefinite; `used_cholesky` records that.
std::vector<double> fbm_scalar(double hurst, std::size_t steps, double dt, Rng& rng,
                               bool* used_cholesky = nullptr, bool force_cholesky = false);

// Deterministic in (spec, grid, seed). The lattice t_start + j dt must contain
// t = 0 (t_start/dt integral) and (t_end - t_start)/dt must be integral up to
// 1e-9 relative. Two-sided paths glue independent one-sided paths at N_0 = 0:
// N_{-u} = -N'_u.
NoisePath gen_path(const NoiseSpec& spec, const SpatialGrid& grid, double t_start, double t_end,
                   double dt, std::uint64_t seed);

// path'(s) = path(s + tau) - path(tau) on the window [t_start - tau, t_end - tau].
NoisePath wiener_shift(const NoisePath& path, double tau);

// Copy of the sub-window [t0, t1] (grid-aligned).
NoisePath restrict_window(const NoisePath& path, double t0, double t1);

// Multiply every value by c.
NoisePath scaled(const NoisePath& path, double c);

struct StationarityReport {
  std::size_t windows = 0;
  std::size_t samples = 0;
  // max over windows and over {mean, variance, 4th moment} of the two-sample
  // standardized difference against window 0
  double max_discrepancy = 0.0;
  std::vector<double> window_means;
  std::vector<double> window_variances;
};

// Increments of the mode-1 coefficient <N, e_1> over [t_w, t_w + lag] for
// disjoint windows t_w = 2 w lag on the positive side.
StationarityReport check_stationary_increments(const NoiseSpec& spec, const SpatialGrid& grid,
                                               double lag, double dt, std::size_t window_count,
                                               std::size_t samples, std::uint64_t seed);

struct GrowthReport {
  double max_ratio = 0.0;        // max_t ||N_t||_V / (1 + t^2)
  double terminal_ratio = 0.0;   // ||N_T||_V / |T| at the far end
  double terminal_time = 0.0;
  std::optional<double> lln_relative_error;  // Levy only
};

GrowthReport check_growth(const NoisePath& path, const TripleSpec& triple);

// Least-squares slope of log E||N_lag - N_0||_V^gamma against log lag.
double moment_scaling_fit(const NoiseSpec& spec, const SpatialGrid& grid, const TripleSpec& triple,
                          double gamma, const std::vector<double>& lags, double dt,
                          std::size_t samples, std::uint64_t seed);

// max over grid pairs u < v in [s0, t0] of ||N_u - N_v||_V / |u - v|^b.
double holder_seminorm(const NoisePath& path, const TripleSpec& triple, double b, double s0,
                       double t0);

// sum dt ||N_t||_V^alpha over the window.
double regularity_integral(const NoisePath& path, const TripleSpec& triple, double alpha);

// Text persistence. Header `# kind=... seed=... dt=... t0=... t1=... modes=...`
// plus parameter lines, then one `t v_1 ... v_n` line per time, %.17g.
void write_noise(std::ostream& os, const NoisePath& path);
NoisePath read_noise(std::istream& is);

}  // namespace af
