#include "attractor_forge/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "attractor_forge/errors.hpp"
#include "attractor_forge/parallel.hpp"

namespace af {

namespace {

double sq(double x) { return x * x; }

struct LineFit {
  double slope = 0.0;
  bool ok = false;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.ok = true;
  return f;
}

double max_pairwise(const std::vector<Field>& members, const TripleSpec& triple) {
  double d = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      d = std::max(d, norm_H(members[i] - members[j], triple));
  return d;
}

// Chains flow maps through the sorted sample times; states before `start`
// stay at the initial value.
std::vector<Field> states_at(const DriftSpec& drift, const TripleSpec& triple,
                             const NoisePath& noise, const Field& x, double start,
                             const std::vector<double>& times, const SolverConfig& cfg) {
  std::vector<Field> out;
  Field cur = x;
  double now = start;
  for (double t : times) {
    if (t < start) throw ConfigError("sample time precedes the start time");
    cur = flow_map(drift, triple, noise, cur, now, t, cfg);
    now = t;
    out.push_back(cur);
  }
  return out;
}

}  // namespace

std::string to_string(RateKind k) {
  return k == RateKind::Polynomial ? "polynomial" : "exponential";
}

std::vector<double> default_pullback_ladder() { return {-1.0, -2.0, -5.0, -10.0, -20.0, -40.0}; }

double comparison_oracle(double h0, double lambda, double beta, double elapsed) {
  if (beta < 2.0) throw DomainError("comparison_oracle: beta must be >= 2");
  if (!(lambda > 0.0)) throw DomainError("comparison_oracle: lambda must be positive");
  if (elapsed < 0.0 || h0 < 0.0) throw DomainError("comparison_oracle: negative argument");
  if (beta == 2.0) {
    if (std::isinf(h0)) return h0;
    return h0 * std::exp(-lambda * elapsed);
  }
  const double g = beta - 2.0;
  const double start = std::isinf(h0) ? 0.0 : std::pow(h0, -g / 2.0);
  const double base = start + lambda / 2.0 * g * elapsed;
  if (base == 0.0) return h0;
  return std::pow(base, -2.0 / g);
}

double discrete_comparison_bound(double h0, double lambda, double beta, double dt, double elapsed) {
  if (beta < 2.0) throw DomainError("discrete_comparison_bound: beta must be >= 2");
  if (!(lambda > 0.0) || !(dt > 0.0)) throw DomainError("discrete_comparison_bound: lambda and dt must be positive");
  if (elapsed < 0.0 || h0 < 0.0) throw DomainError("discrete_comparison_bound: negative argument");
  if (std::isinf(h0)) return h0;
  const double q = elapsed / dt;
  auto full = static_cast<std::size_t>(std::floor(q + 1e-9));
  const double rest = elapsed - static_cast<double>(full) * dt;
  double x = std::sqrt(h0);
  auto step = [&](double h) {
    const double a = 0.5 * h * lambda;
    if (beta == 2.0) {
      x /= 1.0 + a;
      return;
    }
    // y + a y^{beta-1} = x is convex increasing in y; Newton from y = x
    // decreases monotonically onto the root
    double y = x;
    for (int it = 0; it < 100; ++it) {
      const double p = std::pow(y, beta - 2.0);
      const double next = y - (y + a * p * y - x) / (1.0 + a * (beta - 1.0) * p);
      if (!(next < y) || next <= 0.0) break;
      y = next;
    }
    x = y;
  };
  if (beta == 2.0) {
    x *= std::pow(1.0 + 0.5 * dt * lambda, -static_cast<double>(full));
  } else {
    for (std::size_t k = 0; k < full && x > 0.0; ++k) step(dt);
  }
  if (rest > 1e-9 * dt) step(rest);
  return x * x;
}

PullbackResult pullback_run(const DriftSpec& drift, const TripleSpec& triple,
                            const NoisePath& noise, const std::vector<Field>& bundle,
                            const std::vector<double>& s_list, double eval_time,
                            const SolverConfig& cfg, const DriftConstants& k) {
  if (bundle.empty()) throw ConfigError("pullback_run: empty bundle");
  if (s_list.empty()) throw ConfigError("pullback_run: empty s_list");
  for (double s : s_list) {
    if (s > eval_time) throw ConfigError("pullback_run: start times must not exceed eval_time");
    if (!noise.contains(s)) throw RangeError("pullback_run: s=" + std::to_string(s) +
                                             " outside the noise window");
  }
  if (!noise.contains(eval_time)) throw RangeError("pullback_run: eval_time outside the noise window");

  PullbackResult res;
  res.s_list = s_list;
  res.eval_time = eval_time;
  const std::size_t S = s_list.size(), M = bundle.size();
  std::vector<Field> flat(S * M, Field(bundle.front().grid()));
  parallel_for(S * M, [&](std::size_t job) {
    const std::size_t si = job / M, mi = job % M;
    try {
      flat[job] = flow_map(drift, triple, noise, bundle[mi], s_list[si], eval_time, cfg);
    } catch (const SolverFailure& e) {
      throw SolverFailure(std::string(e.what()) + " (pullback start s=" +
                              std::to_string(s_list[si]) + ")",
                          e.step());
    }
  });
  res.endpoints.resize(S);
  for (std::size_t si = 0; si < S; ++si)
    for (std::size_t mi = 0; mi < M; ++mi) res.endpoints[si].push_back(flat[si * M + mi]);

  const double d0 = max_pairwise(bundle, triple);
  double scale = 0.0;
  for (const auto& row : res.endpoints)
    for (const auto& f : row) scale = std::max(scale, norm_H(f, triple));

  const bool can_bound = k.lambda > 0.0 && k.beta >= 2.0;
  std::size_t deepest = 0;
  for (std::size_t si = 0; si < S; ++si) {
    const double d = max_pairwise(res.endpoints[si], triple);
    res.diameters.push_back(d);
    double bound = std::numeric_limits<double>::infinity();
    if (can_bound) {
      bound = discrete_comparison_bound(d0 * d0, k.lambda, k.beta, cfg.dt, eval_time - s_list[si]);
      if (d * d > 1.1 * bound + 1e-20 * (1.0 + scale * scale)) ++res.bound_violations;
    }
    res.bound_values.push_back(bound);
    if (s_list[si] < s_list[deepest]) deepest = si;
  }
  res.eta0 = res.endpoints[deepest][0];
  res.eta0_error = res.diameters[deepest];

  res.rate.kind = k.beta > 2.0 ? RateKind::Polynomial : RateKind::Exponential;
  const double floor = 1e-13 * (1.0 + scale);
  std::vector<double> xs, ys;
  for (std::size_t si = 0; si < S; ++si) {
    const double el = eval_time - s_list[si];
    if (el <= 0.0 || res.diameters[si] <= floor) continue;
    xs.push_back(res.rate.kind == RateKind::Polynomial ? std::log(el) : el);
    ys.push_back(std::log(sq(res.diameters[si])));
  }
  LineFit f = least_squares(xs, ys);
  res.rate.points = xs.size();
  res.rate.ok = f.ok;
  res.rate.value = res.rate.kind == RateKind::Polynomial ? f.slope : -f.slope;
  return res;
}

PolynomialBoundReport verify_polynomial_bound(const DriftSpec& drift, const TripleSpec& triple,
                                              const NoisePath& noise, const Field& x,
                                              const Field& y, double s1, double s2,
                                              const std::vector<double>& sample_times,
                                              const SolverConfig& cfg, const DriftConstants& k) {
  if (!(k.beta > 2.0)) throw ConfigError("verify_polynomial_bound: requires beta > 2");
  if (!(k.lambda > 0.0)) throw ConfigError("verify_polynomial_bound: requires certified lambda > 0");
  if (s1 > s2) throw ConfigError("verify_polynomial_bound: need s1 <= s2");
  std::vector<double> times = sample_times;
  std::sort(times.begin(), times.end());
  if (times.empty() || times.front() <= s2)
    throw ConfigError("verify_polynomial_bound: sample times must follow s2");
  auto sx = states_at(drift, triple, noise, x, s1, times, cfg);
  auto sy = states_at(drift, triple, noise, y, s2, times, cfg);
  PolynomialBoundReport rep;
  for (std::size_t i = 0; i < times.size(); ++i) {
    BoundSample b;
    b.t = times[i];
    b.dist_sq = sq(norm_H(sx[i] - sy[i], triple));
    b.bound = comparison_oracle(std::numeric_limits<double>::infinity(), k.lambda, k.beta,
                                times[i] - s2);
    b.ratio = b.dist_sq / b.bound;
    rep.max_ratio = std::max(rep.max_ratio, b.ratio);
    rep.samples.push_back(b);
  }
  return rep;
}

ExponentialBoundReport verify_exponential_bound(const DriftSpec& drift, const TripleSpec& triple,
                                                const NoisePath& noise, const Field& x,
                                                const Field& y, double eta_margin, double s1,
                                                double s2, const std::vector<double>& sample_times,
                                                const SolverConfig& cfg, const DriftConstants& k,
                                                double tolerance) {
  if (k.beta != 2.0) throw ConfigError("verify_exponential_bound: requires beta = 2");
  if (!(k.lambda > 0.0)) throw ConfigError("verify_exponential_bound: requires certified lambda > 0");
  if (!(eta_margin > 0.0 && eta_margin < 1.0))
    throw ConfigError("verify_exponential_bound: eta_margin must lie in (0,1)");
  if (s1 > s2) throw ConfigError("verify_exponential_bound: need s1 <= s2");
  std::vector<double> times = sample_times;
  std::sort(times.begin(), times.end());
  if (times.empty() || times.front() < s2)
    throw ConfigError("verify_exponential_bound: sample times must not precede s2");

  ExponentialBoundReport rep;
  auto sx = states_at(drift, triple, noise, x, s1, times, cfg);
  auto sy = states_at(drift, triple, noise, y, s2, times, cfg);
  double scale = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i)
    scale = std::max({scale, norm_H(sx[i], triple), norm_H(sy[i], triple)});
  std::vector<double> xs, ys;
  const double floor = sq(1e-13 * (1.0 + scale));
  double first = -1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    BoundSample b;
    b.t = times[i];
    b.dist_sq = sq(norm_H(sx[i] - sy[i], triple));
    if (first < 0.0) first = b.dist_sq;
    b.bound = first * std::exp(-k.lambda * (times[i] - times.front()));
    b.ratio = b.bound > 0.0 ? b.dist_sq / b.bound : 0.0;
    rep.samples.push_back(b);
    if (b.dist_sq > floor) {
      xs.push_back(times[i]);
      ys.push_back(std::log(b.dist_sq));
    }
  }
  LineFit f = least_squares(xs, ys);
  rep.fit_skipped = !f.ok;
  rep.lambda_hat = f.ok ? -f.slope : 0.0;
  rep.satisfied = rep.fit_skipped || rep.lambda_hat >= k.lambda * (1.0 - tolerance);

  // K_eta = int_{-inf}^0 e^{eta r / 2} C_eta(r) dr, truncated to the noise window.
  const double eta_tilde = k.lambda;
  rep.eta = (1.0 - eta_margin) * eta_tilde;
  const double alpha = k.alpha;
  const double eps1 = std::min((eta_tilde - rep.eta) / (eta_tilde + k.K), 1.0);
  double c_eps2 = 0.0;
  if (k.C > 0.0) {
    const double eps2 = k.delta * eps1 / k.C;
    const double conj = alpha / (alpha - 1.0);
    c_eps2 = std::pow(2.0, alpha) / alpha * std::pow(eps2 * conj, -(alpha - 1.0));
  }
  double integral = 0.0;
  double prev_r = 0.0, prev_v = 0.0;
  bool have = false;
  for (std::size_t i = 0; i < noise.count; ++i) {
    const double r = noise.time(i);
    if (r > 1e-12) break;
    const Field N = noise.at(i);
    const double c_eta = rep.eta * sq(norm_H(N, triple)) +
                         c_eps2 * std::pow(norm_V(N, triple), alpha) + eps1 * k.C;
    const double v = std::exp(rep.eta * r / 2.0) * c_eta;
    if (have) integral += 0.5 * (r - prev_r) * (v + prev_v);
    prev_r = r;
    prev_v = v;
    have = true;
  }
  rep.K_eta = integral;
  return rep;
}

RadiusEstimate absorbing_radius_r1(const NoisePath& noise, const TripleSpec& triple,
                                   const DriftConstants& k, double horizon) {
  if (!(horizon < -1.0)) throw ConfigError("absorbing_radius_r1: horizon must be < -1");
  if (!(k.lambda > 0.0)) throw ConfigError("absorbing_radius_r1: lambda must be positive");
  const std::size_t a = noise.index_of(horizon);
  const std::size_t b = noise.index_of(-1.0);
  const double lam = k.lambda;
  auto f_plus_c = [&](std::size_t i) {
    const Field N = noise.at(i);
    const double nh = sq(norm_H(N, triple));
    const double nv = std::pow(norm_V(N, triple), k.alpha);
    return std::pair<double, double>{nh, 2.0 * k.K * nh + k.C * (nv + 1.0) + k.C};
  };
  double sup = 0.0, integral = 0.0;
  double prev = 0.0;
  double f_h = 0.0;
  for (std::size_t i = a; i <= b; ++i) {
    const double r = noise.time(i);
    const double w = std::exp(-lam * (-1.0 - r));
    auto [nh, fc] = f_plus_c(i);
    if (i == a) f_h = fc;
    sup = std::max(sup, w * nh);
    const double v = w * fc;
    if (i > a) integral += 0.5 * noise.dt * (v + prev);
    prev = v;
  }
  RadiusEstimate e;
  e.which = "r1";
  e.value_sq = 2.0 + 2.0 * sup + integral;
  e.value = std::sqrt(e.value_sq);
  e.truncation_horizon = horizon;
  e.constants = k;
  // tail beyond the horizon under a quadratic growth envelope of f + C
  e.tail_bound = std::exp(lam * (horizon + 1.0)) * f_h *
                 (1.0 / lam + 2.0 / (lam * lam) + 2.0 / (lam * lam * lam));
  return e;
}

RadiusEstimate absorbing_radius_r2(const DriftSpec& drift, const TripleSpec& triple,
                                   const NoisePath& noise, const std::vector<Field>& x_samples,
                                   const SolverConfig& cfg, const std::vector<double>& s_ladder) {
  if (x_samples.empty()) throw ConfigError("absorbing_radius_r2: no samples");
  if (s_ladder.empty()) throw ConfigError("absorbing_radius_r2: empty ladder");
  for (double s : s_ladder)
    if (s > -2.0) throw ConfigError("absorbing_radius_r2: ladder entries must be <= -2");
  const std::size_t M = x_samples.size(), L = s_ladder.size();
  std::vector<double> zs(M * L), zh(M * L);
  const Field N0 = noise.value(0.0);
  const Field Nm1 = noise.value(-1.0);
  parallel_for(M * L, [&](std::size_t job) {
    const std::size_t mi = job % M, li = job / M;
    const Field at_m1 = flow_map(drift, triple, noise, x_samples[mi], s_ladder[li], -1.0, cfg);
    const Field at_0 = flow_map(drift, triple, noise, at_m1, -1.0, 0.0, cfg);
    zs[job] = norm_S(at_0 - N0, triple);
    zh[job] = norm_H(at_m1 - Nm1, triple);
  });
  RadiusEstimate e;
  e.which = "r2";
  e.truncation_horizon = *std::min_element(s_ladder.begin(), s_ladder.end());
  for (std::size_t j = 0; j < M * L; ++j) {
    e.value = std::max(e.value, zs[j]);
    e.C2 = std::max(e.C2, sq(zs[j]) / (sq(zh[j]) + 1.0));
  }
  e.value_sq = sq(e.value);
  return e;
}

double random_fixed_point_check(const DriftSpec& drift, const TripleSpec& triple,
                                const NoisePath& noise, double t_shift, const SolverConfig& cfg,
                                double depth) {
  if (!(depth < 0.0)) throw ConfigError("random_fixed_point_check: depth must be negative");
  if (t_shift < 0.0) throw ConfigError("random_fixed_point_check: t_shift must be >= 0");
  const Field x0 = Field::zeros(noise.grid);
  const Field eta0 = flow_map(drift, triple, noise, x0, depth, 0.0, cfg);
  if (t_shift == 0.0) return 0.0;
  const Field moved = flow_map(drift, triple, noise, eta0, 0.0, t_shift, cfg);
  const NoisePath shifted = wiener_shift(noise, t_shift);
  const Field eta_shift = flow_map(drift, triple, shifted, x0, depth, 0.0, cfg);
  return norm_H(moved - eta_shift, triple);
}

void write_pullback_csv(std::ostream& os, const PullbackResult& res, const TripleSpec& triple) {
  char buf[200];
  os << "s,t,member_id,dist_H_sq,bound_value,ratio\n";
  for (std::size_t si = 0; si < res.s_list.size(); ++si) {
    const auto& row = res.endpoints[si];
    for (std::size_t mi = 0; mi < row.size(); ++mi) {
      const double d = sq(norm_H(row[mi] - row[0], triple));
      const double b = res.bound_values[si];
      const double ratio = std::isfinite(b) && b > 0.0 ? d / b : 0.0;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%.17g,%.17g,%.17g\n", res.s_list[si],
                    res.eval_time, mi, d, b, ratio);
      os << buf;
    }
  }
  std::snprintf(buf, sizeof buf, "# rate_kind=%s rate=%.17g rate_points=%zu\n",
                to_string(res.rate.kind).c_str(), res.rate.value, res.rate.points);
  os << buf;
  std::snprintf(buf, sizeof buf, "# eta0_norm_H=%.17g eta0_error=%.17g bound_violations=%zu\n",
                norm_H(res.eta0, triple), res.eta0_error, res.bound_violations);
  os << buf;
}

}  // namespace af
