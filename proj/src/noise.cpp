#include "attractor_forge/noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>

#include "attractor_forge/errors.hpp"
#include "attractor_forge/parallel.hpp"

namespace af {

namespace {

std::mutex g_fftw_planner;

constexpr double kLatticeTol = 1e-9;

// Nearest integer to x if |x - round(x)| <= tol * max(1, |x|).
bool near_integer(double x, long long& out) {
  const double r = std::round(x);
  if (std::abs(x - r) > kLatticeTol * std::max(1.0, std::abs(x))) return false;
  out = static_cast<long long>(r);
  return true;
}

// In-place forward DFT of length m.
void fft_forward(std::vector<std::complex<double>>& data) {
  const int m = static_cast<int>(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_planner);
    plan = fftw_plan_dft_1d(m, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(g_fftw_planner);
  fftw_destroy_plan(plan);
}

// Autocovariance of unit-step fractional Gaussian noise at lag k.
double fgn_cov(double hurst, double k) {
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(k + 1.0), h2) - 2.0 * std::pow(std::abs(k), h2) +
                std::pow(std::abs(k - 1.0), h2));
}

std::vector<double> fbm_cholesky(double hurst, std::size_t steps, double dt, Rng& rng) {
  if (steps > 2048)
    throw DomainError("fbm: Cholesky fallback limited to 2048 steps, got " +
                      std::to_string(steps));
  const std::size_t n = steps;
  const double h2 = 2.0 * hurst;
  std::vector<double> L(n * n, 0.0);
  auto cov = [&](std::size_t i, std::size_t j) {
    const double t = static_cast<double>(i + 1) * dt;
    const double s = static_cast<double>(j + 1) * dt;
    return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
  };
  for (std::size_t j = 0; j < n; ++j) {
    double d = cov(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
    if (d <= 0.0) throw InternalError("fbm: covariance not positive definite");
    const double ljj = std::sqrt(d);
    L[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = cov(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
      L[i * n + j] = s / ljj;
    }
  }
  std::normal_distribution<double> normal;
  std::vector<double> z(n);
  for (auto& v : z) v = normal(rng);
  std::vector<double> out(steps + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += L[i * n + k] * z[k];
    out[i + 1] = s;
  }
  return out;
}

// Scalar coefficient paths c_k(j dt), j = 0..steps, for one side of the origin.
// Rows are modes (index k-1), columns times.
std::vector<std::vector<double>> one_sided_coefficients(const NoiseSpec& spec, std::size_t steps,
                                                        double dt, std::uint64_t seed,
                                                        std::uint64_t side, bool& fallback) {
  const std::size_t modes = spec.mode_count();
  std::vector<std::vector<double>> c(modes, std::vector<double>(steps + 1, 0.0));
  if (spec.kind == NoiseKind::Zero || steps == 0) return c;

  const double sdt = std::sqrt(dt);
  for (std::size_t k = 0; k < spec.mode_weights.size(); ++k) {
    const double w = spec.mode_weights[k];
    if (w == 0.0) continue;
    const double a = std::sqrt(w);
    Rng rng = derived_rng(seed, {side, 1, k});
    if (spec.kind == NoiseKind::FBM) {
      bool chol = false;
      auto b = fbm_scalar(spec.hurst, steps, dt, rng, &chol);
      fallback = fallback || chol;
      for (std::size_t j = 0; j <= steps; ++j) c[k][j] = a * b[j];
    } else {
      std::normal_distribution<double> normal;
      double acc = 0.0;
      for (std::size_t j = 1; j <= steps; ++j) {
        acc += sdt * normal(rng);
        c[k][j] = a * acc;
      }
    }
  }

  if (spec.kind == NoiseKind::Levy) {
    for (std::size_t k = 0; k < spec.drift_modes.size(); ++k)
      for (std::size_t j = 0; j <= steps; ++j)
        c[k][j] += spec.drift_modes[k] * dt * static_cast<double>(j);

    if (spec.jump_rate > 0.0) {
      Rng rng = derived_rng(seed, {side, 2});
      std::exponential_distribution<double> wait(spec.jump_rate);
      std::normal_distribution<double> normal(spec.jump_mean,
                                              spec.jump_spread > 0 ? spec.jump_spread : 1.0);
      std::uniform_real_distribution<double> uniform(spec.jump_mean - spec.jump_spread,
                                                     spec.jump_mean + spec.jump_spread);
      const double horizon = dt * static_cast<double>(steps);
      std::vector<double> jumps(steps + 1, 0.0);  // jump mass arriving in (t_{j-1}, t_j]
      double t = wait(rng);
      while (t <= horizon) {
        double amp = spec.jump_mean;
        if (spec.jump_law == JumpLaw::Normal && spec.jump_spread > 0.0) amp = normal(rng);
        if (spec.jump_law == JumpLaw::Uniform && spec.jump_spread > 0.0) amp = uniform(rng);
        auto j = static_cast<std::size_t>(std::ceil(t / dt - 1e-12));
        j = std::clamp<std::size_t>(j, 1, steps);
        jumps[j] += amp;
        t += wait(rng);
      }
      double acc = 0.0;
      auto& row = c[spec.jump_mode - 1];
      for (std::size_t j = 0; j <= steps; ++j) {
        acc += jumps[j];
        row[j] += acc;
      }
    }
  }
  return c;
}

}  // namespace

std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::Zero: return "zero";
    case NoiseKind::QWiener: return "qwiener";
    case NoiseKind::FBM: return "fbm";
    case NoiseKind::Levy: return "levy";
  }
  return "?";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "zero") return NoiseKind::Zero;
  if (s == "qwiener") return NoiseKind::QWiener;
  if (s == "fbm") return NoiseKind::FBM;
  if (s == "levy") return NoiseKind::Levy;
  throw ConfigError("unknown noise kind '" + s + "'");
}

std::string to_string(JumpLaw j) {
  switch (j) {
    case JumpLaw::Deterministic: return "deterministic";
    case JumpLaw::Normal: return "normal";
    case JumpLaw::Uniform: return "uniform";
  }
  return "?";
}

JumpLaw jump_law_from_string(const std::string& s) {
  if (s == "deterministic") return JumpLaw::Deterministic;
  if (s == "normal") return JumpLaw::Normal;
  if (s == "uniform") return JumpLaw::Uniform;
  throw ConfigError("unknown jump law '" + s + "'");
}

std::vector<double> NoiseSpec::power_weights(std::size_t modes, double decay, double scale) {
  std::vector<double> w(modes);
  for (std::size_t k = 0; k < modes; ++k)
    w[k] = scale * std::pow(static_cast<double>(k + 1), -decay);
  return w;
}

NoiseSpec NoiseSpec::qwiener(std::vector<double> weights) {
  NoiseSpec s;
  s.kind = NoiseKind::QWiener;
  s.mode_weights = std::move(weights);
  return s;
}

NoiseSpec NoiseSpec::fbm(double hurst, std::vector<double> weights) {
  NoiseSpec s;
  s.kind = NoiseKind::FBM;
  s.hurst = hurst;
  s.mode_weights = std::move(weights);
  return s;
}

NoiseSpec NoiseSpec::levy(std::vector<double> drift_modes, std::vector<double> wiener_weights,
                          double jump_rate, std::size_t jump_mode, JumpLaw law, double jump_mean,
                          double jump_spread) {
  NoiseSpec s;
  s.kind = NoiseKind::Levy;
  s.drift_modes = std::move(drift_modes);
  s.mode_weights = std::move(wiener_weights);
  s.jump_rate = jump_rate;
  s.jump_mode = jump_mode;
  s.jump_law = law;
  s.jump_mean = jump_mean;
  s.jump_spread = jump_spread;
  return s;
}

void NoiseSpec::validate() const {
  std::size_t first = 0;
  for (std::size_t k = 0; k < mode_weights.size(); ++k) {
    const double w = mode_weights[k];
    if (!std::isfinite(w) || w < 0.0)
      throw ConfigError("noise: mode weight " + std::to_string(k + 1) +
                        " must be finite and nonnegative");
    if (w > 0.0 && first == 0) first = k + 1;
  }
  // Decay surrogate: lambda_k k^6 may not exceed its value at the first
  // active mode.
  if (first > 0) {
    const double c = mode_weights[first - 1] * std::pow(static_cast<double>(first), 6.0);
    for (std::size_t k = first; k < mode_weights.size(); ++k) {
      const double ck = mode_weights[k] * std::pow(static_cast<double>(k + 1), 6.0);
      if (ck > c * (1.0 + 1e-12))
        throw ConfigError("noise: mode weights must decay at least like k^-6 (mode " +
                          std::to_string(k + 1) + ")");
    }
  }
  if (kind == NoiseKind::FBM && !(hurst > 0.0 && hurst < 1.0))
    throw ConfigError("noise: Hurst parameter must lie in (0,1)");
  if (kind == NoiseKind::Levy) {
    if (!std::isfinite(jump_rate) || jump_rate < 0.0)
      throw ConfigError("noise: jump rate must be finite and nonnegative");
    if (jump_mode < 1) throw ConfigError("noise: jump mode must be >= 1");
    if (!std::isfinite(jump_mean) || !std::isfinite(jump_spread) || jump_spread < 0.0)
      throw ConfigError("noise: invalid jump amplitude law");
    for (double m : drift_modes)
      if (!std::isfinite(m)) throw ConfigError("noise: drift coefficients must be finite");
  }
}

double NoiseSpec::expected_jump() const { return jump_mean; }

std::size_t NoiseSpec::mode_count() const {
  switch (kind) {
    case NoiseKind::Zero: return 0;
    case NoiseKind::QWiener:
    case NoiseKind::FBM: return mode_weights.size();
    case NoiseKind::Levy:
      return std::max({mode_weights.size(), drift_modes.size(),
                       jump_rate > 0.0 ? jump_mode : std::size_t{0}});
  }
  return 0;
}

Field NoisePath::at(std::size_t i) const {
  auto r = row(i);
  return Field(grid, std::vector<double>(r.begin(), r.end()));
}

std::size_t NoisePath::index_of(double t) const {
  const double x = (t - t_start) / dt;
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-7) throw AlignmentError("noise: time " + std::to_string(t) +
                                                   " is not on the path grid");
  if (r < 0.0 || r > static_cast<double>(count - 1))
    throw RangeError("noise: time " + std::to_string(t) + " outside window [" +
                     std::to_string(t_start) + ", " + std::to_string(t_end()) + "]");
  return static_cast<std::size_t>(r);
}

bool NoisePath::contains(double t) const {
  const double tol = 1e-7 * dt;
  return t >= t_start - tol && t <= t_end() + tol;
}

std::vector<double> fbm_scalar(double hurst, std::size_t steps, double dt, Rng& rng,
                               bool* used_cholesky, bool force_cholesky) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("fbm: Hurst parameter must lie in (0,1)");
  if (used_cholesky) *used_cholesky = false;
  if (steps == 0) return {0.0};

  std::size_t m = 1;
  while (m < steps) m <<= 1;
  const std::size_t size = 2 * m;

  std::vector<double> eig;
  bool psd = !force_cholesky;
  if (psd) {
    std::vector<std::complex<double>> row(size);
    for (std::size_t k = 0; k <= m; ++k) row[k] = fgn_cov(hurst, static_cast<double>(k));
    for (std::size_t k = m + 1; k < size; ++k) row[k] = row[size - k];
    fft_forward(row);
    eig.resize(size);
    double top = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      eig[k] = row[k].real();
      top = std::max(top, std::abs(eig[k]));
    }
    for (double& e : eig) {
      if (e < -1e-10 * top) psd = false;
      e = std::max(e, 0.0);
    }
  }
  if (!psd) {
    if (used_cholesky) *used_cholesky = true;
    return fbm_cholesky(hurst, steps, dt, rng);
  }

  std::normal_distribution<double> normal;
  std::vector<std::complex<double>> w(size);
  const double norm = 1.0 / static_cast<double>(size);
  for (std::size_t k = 0; k < size; ++k) {
    const double a = std::sqrt(eig[k] * norm);
    const double re = normal(rng);
    const double im = normal(rng);
    w[k] = {a * re, a * im};
  }
  fft_forward(w);

  const double scale = std::pow(dt, hurst);
  std::vector<double> out(steps + 1, 0.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    acc += scale * w[j].real();
    out[j + 1] = acc;
  }
  return out;
}

NoisePath gen_path(const NoiseSpec& spec, const SpatialGrid& grid, double t_start, double t_end,
                   double dt, std::uint64_t seed) {
  spec.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("noise: dt must be positive");
  if (!(t_start < t_end)) throw ConfigError("noise: need t_start < t_end");
  long long i0 = 0, i1 = 0;
  if (!near_integer(t_start / dt, i0) || !near_integer(t_end / dt, i1))
    throw ConfigError("noise: window endpoints must be integer multiples of dt");

  NoisePath path;
  path.spec = spec;
  path.seed = seed;
  path.grid = grid;
  path.dt = dt;
  path.t_start = static_cast<double>(i0) * dt;
  path.count = static_cast<std::size_t>(i1 - i0 + 1);
  const std::size_t n = grid.n_interior();
  path.data.assign(path.count * n, 0.0);
  if (spec.kind == NoiseKind::Zero) return path;

  const std::size_t modes = spec.mode_count();
  std::vector<Field> basis;
  basis.reserve(modes);
  for (std::size_t k = 1; k <= modes; ++k) basis.push_back(Field::mode(grid, k));

  auto fill = [&](const std::vector<std::vector<double>>& c, long long sign, std::size_t steps) {
    // lattice index i <-> time i*dt; forward side i = j, backward i = -j
    for (std::size_t j = 0; j <= steps; ++j) {
      const long long i = sign * static_cast<long long>(j);
      if (i < i0 || i > i1) continue;
      double* out = path.data.data() + static_cast<std::size_t>(i - i0) * n;
      for (std::size_t k = 0; k < modes; ++k) {
        const double a = static_cast<double>(sign) * c[k][j];
        if (a == 0.0) continue;
        auto e = basis[k].values();
        for (std::size_t x = 0; x < n; ++x) out[x] += a * e[x];
      }
    }
  };

  bool fallback = false;
  if (i1 > 0) {
    const auto steps = static_cast<std::size_t>(i1);
    fill(one_sided_coefficients(spec, steps, dt, seed, 0, fallback), 1, steps);
  }
  if (i0 < 0) {
    const auto steps = static_cast<std::size_t>(-i0);
    fill(one_sided_coefficients(spec, steps, dt, seed, 1, fallback), -1, steps);
  }
  path.cholesky_fallback = fallback;
  return path;
}

NoisePath wiener_shift(const NoisePath& path, double tau) {
  const std::size_t anchor = path.index_of(tau);
  long long q = 0;
  if (!near_integer(tau / path.dt, q))
    throw AlignmentError("wiener_shift: tau must be an integer multiple of dt");
  NoisePath out = path;
  out.t_start = path.t_start - static_cast<double>(q) * path.dt;
  const std::size_t n = path.grid.n_interior();
  auto base = path.row(anchor);
  for (std::size_t i = 0; i < path.count; ++i)
    for (std::size_t x = 0; x < n; ++x) out.data[i * n + x] = path.data[i * n + x] - base[x];
  return out;
}

NoisePath restrict_window(const NoisePath& path, double t0, double t1) {
  const std::size_t a = path.index_of(t0);
  const std::size_t b = path.index_of(t1);
  if (b < a) throw RangeError("restrict_window: empty window");
  const std::size_t n = path.grid.n_interior();
  NoisePath out = path;
  out.t_start = path.time(a);
  out.count = b - a + 1;
  out.data.assign(path.data.begin() + static_cast<std::ptrdiff_t>(a * n),
                  path.data.begin() + static_cast<std::ptrdiff_t>((b + 1) * n));
  return out;
}

NoisePath scaled(const NoisePath& path, double c) {
  NoisePath out = path;
  for (double& v : out.data) v *= c;
  return out;
}

StationarityReport check_stationary_increments(const NoiseSpec& spec, const SpatialGrid& grid,
                                               double lag, double dt, std::size_t window_count,
                                               std::size_t samples, std::uint64_t seed) {
  long long q = 0;
  if (!near_integer(lag / dt, q) || q <= 0)
    throw ConfigError("check_stationary_increments: lag must be a positive multiple of dt");
  if (window_count < 2 || samples < 2)
    throw ConfigError("check_stationary_increments: need >= 2 windows and >= 2 samples");

  const Field e1 = Field::mode(grid, 1);
  const double horizon = 2.0 * lag * static_cast<double>(window_count);
  // per sample, per window: the mode-1 increment
  std::vector<double> x(samples * window_count);
  parallel_for(samples, [&](std::size_t s) {
    NoisePath p = gen_path(spec, grid, 0.0, horizon, dt, derived_rng(seed, {s})());
    for (std::size_t w = 0; w < window_count; ++w) {
      const std::size_t a = 2 * w * static_cast<std::size_t>(q);
      Field inc = p.at(a + static_cast<std::size_t>(q)) - p.at(a);
      x[s * window_count + w] = l2_inner(inc, e1);
    }
  });

  StationarityReport rep;
  rep.windows = window_count;
  rep.samples = samples;
  const double S = static_cast<double>(samples);
  struct Moments { double m1 = 0, m2 = 0, m4 = 0, m8 = 0; };
  std::vector<Moments> mom(window_count);
  for (std::size_t w = 0; w < window_count; ++w) {
    for (std::size_t s = 0; s < samples; ++s) {
      const double v = x[s * window_count + w];
      const double v2 = v * v, v4 = v2 * v2;
      mom[w].m1 += v;
      mom[w].m2 += v2;
      mom[w].m4 += v4;
      mom[w].m8 += v4 * v4;
    }
    mom[w].m1 /= S;
    mom[w].m2 /= S;
    mom[w].m4 /= S;
    mom[w].m8 /= S;
    rep.window_means.push_back(mom[w].m1);
    rep.window_variances.push_back(mom[w].m2 - mom[w].m1 * mom[w].m1);
  }
  auto z = [S](double a, double b, double va, double vb) {
    const double diff = std::abs(a - b);
    const double se = std::sqrt(std::max(va, 0.0) / S + std::max(vb, 0.0) / S);
    if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / se;
  };
  const Moments& r = mom[0];
  for (std::size_t w = 1; w < window_count; ++w) {
    const Moments& m = mom[w];
    rep.max_discrepancy = std::max(
        {rep.max_discrepancy, z(m.m1, r.m1, m.m2 - m.m1 * m.m1, r.m2 - r.m1 * r.m1),
         z(m.m2, r.m2, m.m4 - m.m2 * m.m2, r.m4 - r.m2 * r.m2),
         z(m.m4, r.m4, m.m8 - m.m4 * m.m4, r.m8 - r.m4 * r.m4)});
  }
  return rep;
}

GrowthReport check_growth(const NoisePath& path, const TripleSpec& triple) {
  GrowthReport rep;
  for (std::size_t i = 0; i < path.count; ++i) {
    const double t = path.time(i);
    rep.max_ratio = std::max(rep.max_ratio, norm_V(path.at(i), triple) / (1.0 + t * t));
  }
  const bool right = std::abs(path.t_end()) >= std::abs(path.t_start);
  const std::size_t last = right ? path.count - 1 : 0;
  const double T = path.time(last);
  rep.terminal_time = T;
  const Field NT = path.at(last);
  if (T != 0.0) rep.terminal_ratio = norm_V(NT, triple) / std::abs(T);

  if (path.spec.kind == NoiseKind::Levy && T != 0.0) {
    const auto& s = path.spec;
    Field mean(path.grid);
    for (std::size_t k = 0; k < s.drift_modes.size(); ++k)
      mean.add_scaled(s.drift_modes[k], Field::mode(path.grid, k + 1));
    if (s.jump_rate > 0.0)
      mean.add_scaled(s.jump_rate * s.expected_jump(), Field::mode(path.grid, s.jump_mode));
    Field avg = (1.0 / T) * NT;
    const double ref = lp_norm(mean, 2.0);
    const double err = lp_norm(avg - mean, 2.0);
    rep.lln_relative_error = ref > 0.0 ? err / ref : err;
  }
  return rep;
}

double moment_scaling_fit(const NoiseSpec& spec, const SpatialGrid& grid, const TripleSpec& triple,
                          double gamma, const std::vector<double>& lags, double dt,
                          std::size_t samples, std::uint64_t seed) {
  std::vector<double> sorted = lags;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() < 4 || !(sorted.front() > 0.0) || sorted.back() < 10.0 * sorted.front() * (1 - 1e-12))
    throw ConfigError("moment_scaling_fit: need >= 4 distinct positive lags spanning a decade");
  if (samples == 0) throw ConfigError("moment_scaling_fit: need samples > 0");
  std::vector<std::size_t> idx;
  for (double l : sorted) {
    long long q = 0;
    if (!near_integer(l / dt, q) || q <= 0)
      throw ConfigError("moment_scaling_fit: lags must be positive multiples of dt");
    idx.push_back(static_cast<std::size_t>(q));
  }
  const double horizon = dt * static_cast<double>(idx.back());
  const std::size_t L = idx.size();
  std::vector<double> acc(samples * L);
  parallel_for(samples, [&](std::size_t s) {
    NoisePath p = gen_path(spec, grid, 0.0, horizon, dt, derived_rng(seed, {s})());
    const Field base = p.at(0);
    for (std::size_t l = 0; l < L; ++l)
      acc[s * L + l] = std::pow(norm_V(p.at(idx[l]) - base, triple), gamma);
  });
  std::vector<double> lx(L), ly(L);
  for (std::size_t l = 0; l < L; ++l) {
    double m = 0.0;
    for (std::size_t s = 0; s < samples; ++s) m += acc[s * L + l];
    m /= static_cast<double>(samples);
    if (!(m > 0.0)) throw DomainError("moment_scaling_fit: vanishing moment (degenerate noise)");
    lx[l] = std::log(sorted[l]);
    ly[l] = std::log(m);
  }
  double mx = 0, my = 0;
  for (std::size_t l = 0; l < L; ++l) { mx += lx[l]; my += ly[l]; }
  mx /= static_cast<double>(L);
  my /= static_cast<double>(L);
  double sxy = 0, sxx = 0;
  for (std::size_t l = 0; l < L; ++l) {
    sxy += (lx[l] - mx) * (ly[l] - my);
    sxx += (lx[l] - mx) * (lx[l] - mx);
  }
  return sxy / sxx;
}

double holder_seminorm(const NoisePath& path, const TripleSpec& triple, double b, double s0,
                       double t0) {
  if (!(b > 0.0 && b < 1.0)) throw ConfigError("holder_seminorm: exponent must lie in (0,1)");
  const std::size_t a = path.index_of(s0);
  const std::size_t e = path.index_of(t0);
  double best = 0.0;
  for (std::size_t u = a; u <= e; ++u) {
    const Field nu = path.at(u);
    for (std::size_t v = u + 1; v <= e; ++v) {
      const double gap = path.dt * static_cast<double>(v - u);
      best = std::max(best, norm_V(path.at(v) - nu, triple) / std::pow(gap, b));
    }
  }
  return best;
}

double regularity_integral(const NoisePath& path, const TripleSpec& triple, double alpha) {
  double s = 0.0;
  for (std::size_t i = 0; i < path.count; ++i) s += path.dt * std::pow(norm_V(path.at(i), triple), alpha);
  return s;
}

}  // namespace af
