#include "attractor_forge/runner.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "attractor_forge/errors.hpp"

#ifndef AF_VERSION
#define AF_VERSION "0.1.0"
#endif

namespace af {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string provenance(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::string out = "# attractor_forge version " + version_string() + "\n";
  out += "# run: command=" + to_string(cfg.kind()) + " seed=" + std::to_string(seed) + "\n";
  out += "# config:\n";
  std::istringstream in(cfg.serialize());
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out += "#   " + line + "\n";
  return out;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Field initial_field(const SpatialGrid& grid, const std::string& shape, double amplitude,
                    std::uint64_t seed) {
  if (shape == "sin") {
    const double L = grid.length();
    return Field::sample(grid, [=](double x) { return amplitude * std::sin(std::numbers::pi * x / L); });
  }
  if (shape == "zero") return Field::zeros(grid);
  if (shape == "constant") return Field::constant(grid, amplitude);
  if (shape == "random") {
    Rng rng = derived_rng(seed, {0x1417});
    Field f = FieldSampler{}.draw(grid, rng);
    f *= amplitude;
    return f;
  }
  throw ConfigError("unknown initial field shape '" + shape + "' (sin, zero, constant, random)");
}

// Noise window needed by the experiment when t_start/t_end are "auto".
std::pair<double, double> auto_window(const ExperimentConfig& cfg) {
  switch (cfg.kind()) {
    case ExperimentKind::Simulate: {
      const double s = cfg.number("simulate", "s"), t = cfg.number("simulate", "t");
      return {std::min(s, 0.0), std::max({t, s, 0.0})};
    }
    case ExperimentKind::Pullback: {
      auto sl = cfg.numbers("pullback", "s_list");
      const double e = cfg.number("pullback", "eval_time");
      double lo = std::min(e, 0.0);
      for (double s : sl) lo = std::min(lo, s);
      return {lo, std::max(e, 0.0)};
    }
    case ExperimentKind::Rates: {
      double lo = std::min({cfg.number("rates", "s1"), cfg.number("rates", "s2"), 0.0});
      double hi = 0.0;
      for (double t : cfg.numbers("rates", "sample_times")) hi = std::max(hi, t);
      return {lo, std::max(hi, lo + 1.0)};
    }
    default: return {-10.0, 10.0};
  }
}

NoisePath make_noise(const ExperimentConfig& cfg, const SpatialGrid& grid, std::uint64_t seed) {
  if (cfg.has("noise", "file")) {
    std::ifstream in(cfg.text("noise", "file"));
    if (!in) throw ConfigError("cannot open noise file '" + cfg.text("noise", "file") + "'");
    NoisePath p = read_noise(in);
    if (!(p.grid == grid)) throw GridMismatchError("noise file grid does not match [grid]");
    return p;
  }
  auto [lo, hi] = auto_window(cfg);
  const double t0 = cfg.number_or_auto("noise", "t_start").value_or(lo);
  const double t1 = cfg.number_or_auto("noise", "t_end").value_or(hi);
  return gen_path(make_noise_spec(cfg), grid, t0, t1, cfg.number("noise", "dt"), seed);
}

std::vector<ConditionId> conditions_for(const std::string& which) {
  if (which == "all")
    return {ConditionId::H1, ConditionId::H2, ConditionId::H2Strong, ConditionId::H3,
            ConditionId::H4, ConditionId::H5Cond1, ConditionId::H5Norms};
  std::vector<ConditionId> out;
  std::stringstream ss(which);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
    out.push_back(condition_from_string(item));
  }
  return out;
}

int run_certify(const ExperimentConfig& cfg, const RunOptions& opt, std::uint64_t seed,
                std::ostream& log) {
  const SpatialGrid grid = make_grid(cfg);
  const DriftSpec drift = make_drift(cfg);
  const TripleSpec triple = make_triple(cfg, drift);
  CertifyOptions co;
  co.trials = static_cast<std::size_t>(cfg.integer("certify", "trials"));
  co.seed = seed;
  co.tolerance = cfg.number("certify", "tolerance");
  co.sampler.amplitude = cfg.number("certify", "sampler_amplitude");
  co.sampler.decay = cfg.number("certify", "sampler_decay");
  const std::string which = cfg.text("certify", "condition");
  const bool explicit_list = which != "all";

  std::string body = "condition,trials,worst_margin,tolerance,satisfied,estimates\n";
  int code = kExitOk;
  for (ConditionId c : conditions_for(which)) {
    ConditionReport rep;
    try {
      rep = certify(drift, triple, grid, c, co);
    } catch (const ConfigError& e) {
      if (explicit_list) throw;
      log << "certify: " << to_string(c) << " skipped: " << e.what() << "\n";
      body += to_string(c) + ",0,nan,nan,inapplicable,\n";
      continue;
    }
    std::string est;
    for (const auto& [k, v] : rep.estimated_constants) {
      if (!est.empty()) est += ';';
      est += k + "=" + fmt(v);
    }
    body += to_string(c) + "," + std::to_string(rep.trials) + "," + fmt(rep.worst_margin) + "," +
            fmt(rep.tolerance) + "," + (rep.satisfied ? "true" : "false") + "," + est + "\n";
    log << "certify: " << to_string(c) << (rep.satisfied ? " satisfied" : " VIOLATED")
        << " worst_margin=" << fmt(rep.worst_margin) << "\n";
    if (!rep.satisfied) code = kExitViolation;
  }
  const DriftConstants k = resolve_constants(drift, grid);
  body += "# constants alpha=" + fmt(k.alpha) + " delta=" + fmt(k.delta) + " K=" + fmt(k.K) +
          " C=" + fmt(k.C) + " lambda=" + fmt(k.lambda) + " beta=" + fmt(k.beta) + "\n";
  write_atomic(join_path(opt.out_dir, "certify.csv"), provenance(cfg, seed) + body);
  return code;
}

int run_simulate(const ExperimentConfig& cfg, const RunOptions& opt, std::uint64_t seed,
                 std::ostream& log) {
  const SpatialGrid grid = make_grid(cfg);
  const DriftSpec drift = make_drift(cfg);
  const TripleSpec triple = make_triple(cfg, drift);
  SolverConfig sc = make_solver(cfg);
  const auto stride = cfg.integer("simulate", "snapshot_stride");
  if (stride < 0) throw ConfigError("[simulate] snapshot_stride must be >= 0");
  sc.snapshot_stride = static_cast<std::size_t>(stride);
  const NoisePath noise = make_noise(cfg, grid, seed);
  const Field x = initial_field(grid, cfg.text("simulate", "initial"),
                                cfg.number("simulate", "amplitude"), seed);
  const FlowTrajectory traj = solve_transformed(drift, triple, noise, x, cfg.number("simulate", "s"),
                                                cfg.number("simulate", "t"), sc);
  std::ostringstream csv;
  write_trajectory_csv(csv, traj, triple);
  const EnergySeries e = energy_diagnostics(traj, drift, triple, noise, resolve_constants(drift, grid));
  std::string summary = "# steps=" + std::to_string(traj.steps) + " halvings=" +
                        std::to_string(traj.halvings) + " energy_min_slack=" + fmt(e.min_slack) +
                        " energy_integrated_slack=" + fmt(e.integrated_slack) + "\n";
  write_atomic(join_path(opt.out_dir, "trajectory.csv"), provenance(cfg, seed) + csv.str() + summary);
  log << "simulate: " << traj.steps << " steps, final |S|_H=" << fmt(norm_H(traj.S.back(), triple))
      << "\n";
  return kExitOk;
}

// Constants for bound checks, or lambda = 0 when strong monotonicity could
// not be certified. A lambda declared in the config is checked as declared:
// the run exists to test it against trajectories.
DriftConstants certified_constants(const DriftSpec& drift, const TripleSpec& triple,
                                   const SpatialGrid& grid, std::uint64_t seed, std::ostream& log) {
  DriftConstants k = resolve_constants(drift, grid);
  CertifyOptions co;
  co.trials = 200;
  co.seed = seed;
  bool ok = false;
  try {
    ok = certify(drift, triple, grid, ConditionId::H2Strong, co).satisfied;
  } catch (const ConfigError& e) {
    log << "warning: " << e.what() << "\n";
  }
  if (drift.lambda_override) {
    if (!ok) log << "warning: declared lambda=" << fmt(k.lambda) << " fails H2' sampling; checking it anyway\n";
    return k;
  }
  if (!ok) {
    log << "warning: strong monotonicity not certified; bound checks skipped\n";
    k.lambda = 0.0;
  }
  return k;
}

int run_pullback(const ExperimentConfig& cfg, const RunOptions& opt, std::uint64_t seed,
                 std::ostream& log) {
  const SpatialGrid grid = make_grid(cfg);
  const DriftSpec drift = make_drift(cfg);
  const TripleSpec triple = make_triple(cfg, drift);
  const SolverConfig sc = make_solver(cfg);
  const NoisePath noise = make_noise(cfg, grid, seed);
  const auto members = cfg.integer("pullback", "bundle");
  if (members < 1) throw ConfigError("[pullback] bundle must be >= 1");
  const double radius = cfg.number("pullback", "radius");
  std::vector<Field> bundle;
  Rng rng = derived_rng(seed, {0xb0d1e});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::int64_t m = 0; m < members; ++m) {
    Field f = FieldSampler{}.draw(grid, rng);
    const double nh = norm_H(f, triple);
    f *= nh > 0.0 ? radius * (1.0 - u(rng)) / nh : 0.0;
    bundle.push_back(std::move(f));
  }
  const DriftConstants k = certified_constants(drift, triple, grid, seed, log);
  const PullbackResult res = pullback_run(drift, triple, noise, bundle,
                                          cfg.numbers("pullback", "s_list"),
                                          cfg.number("pullback", "eval_time"), sc, k);
  std::ostringstream csv;
  write_pullback_csv(csv, res, triple);
  write_atomic(join_path(opt.out_dir, "pullback.csv"), provenance(cfg, seed) + csv.str());
  log << "pullback: rate(" << to_string(res.rate.kind) << ")=" << fmt(res.rate.value)
      << " violations=" << res.bound_violations << "\n";
  return res.bound_violations > 0 ? kExitViolation : kExitOk;
}

int run_rates(const ExperimentConfig& cfg, const RunOptions& opt, std::uint64_t seed,
              std::ostream& log) {
  const SpatialGrid grid = make_grid(cfg);
  const DriftSpec drift = make_drift(cfg);
  const TripleSpec triple = make_triple(cfg, drift);
  const SolverConfig sc = make_solver(cfg);
  const NoisePath noise = make_noise(cfg, grid, seed);
  const std::string shape = cfg.text("rates", "initial");
  const Field x = initial_field(grid, shape, cfg.number("rates", "x_amplitude"), seed);
  const Field y = initial_field(grid, shape, cfg.number("rates", "y_amplitude"), seed + 1);
  const double s1 = cfg.number("rates", "s1"), s2 = cfg.number("rates", "s2");
  const auto times = cfg.numbers("rates", "sample_times");
  const DriftConstants k = certified_constants(drift, triple, grid, seed, log);
  if (!(k.lambda > 0.0)) {
    write_atomic(join_path(opt.out_dir, "rates.csv"),
                 provenance(cfg, seed) + "t,dist_H_sq,bound_value,ratio\n# skipped=uncertified\n");
    return kExitOk;
  }
  std::string body = "t,dist_H_sq,bound_value,ratio\n";
  auto rows = [&](const std::vector<BoundSample>& samples) {
    for (const auto& b : samples)
      body += fmt(b.t) + "," + fmt(b.dist_sq) + "," + fmt(b.bound) + "," + fmt(b.ratio) + "\n";
  };
  int code = kExitOk;
  if (k.beta > 2.0) {
    const auto rep = verify_polynomial_bound(drift, triple, noise, x, y, s1, s2, times, sc, k);
    rows(rep.samples);
    body += "# kind=polynomial max_ratio=" + fmt(rep.max_ratio) + "\n";
    log << "rates: polynomial bound max ratio " << fmt(rep.max_ratio) << "\n";
    if (rep.max_ratio > 1.1) code = kExitViolation;
  } else {
    const auto rep = verify_exponential_bound(drift, triple, noise, x, y,
                                              cfg.number("rates", "eta_margin"), s1, s2, times, sc, k);
    rows(rep.samples);
    body += "# kind=exponential lambda_hat=" + fmt(rep.lambda_hat) + " lambda=" + fmt(k.lambda) +
            " eta=" + fmt(rep.eta) + " K_eta=" + fmt(rep.K_eta) +
            " fit_skipped=" + (rep.fit_skipped ? "1" : "0") + "\n";
    log << "rates: lambda_hat " << fmt(rep.lambda_hat) << " vs certified " << fmt(k.lambda) << "\n";
    if (!rep.satisfied) code = kExitViolation;
  }
  write_atomic(join_path(opt.out_dir, "rates.csv"), provenance(cfg, seed) + body);
  return code;
}

int run_noise_gen(const ExperimentConfig& cfg, const RunOptions& opt, std::uint64_t seed,
                  std::ostream& log) {
  const SpatialGrid grid = make_grid(cfg);
  const NoisePath noise = make_noise(cfg, grid, seed);
  std::ostringstream text;
  write_noise(text, noise);
  write_atomic(join_path(opt.out_dir, "noise.txt"), provenance(cfg, seed) + text.str());

  const TripleSpec triple = TripleSpec::rde();
  const GrowthReport g = check_growth(noise, triple);
  std::string body = "quantity,value\n";
  body += "growth_max_ratio," + fmt(g.max_ratio) + "\n";
  body += "terminal_ratio," + fmt(g.terminal_ratio) + "\n";
  body += "terminal_time," + fmt(g.terminal_time) + "\n";
  body += "regularity_integral_alpha2," + fmt(regularity_integral(noise, triple, 2.0)) + "\n";
  body += std::string("cholesky_fallback,") + (noise.cholesky_fallback ? "1" : "0") + "\n";
  if (g.lln_relative_error) body += "lln_relative_error," + fmt(*g.lln_relative_error) + "\n";
  write_atomic(join_path(opt.out_dir, "noise_summary.csv"), provenance(cfg, seed) + body);
  log << "noise-gen: " << noise.count << " snapshots on [" << fmt(noise.t_start) << ", "
      << fmt(noise.t_end()) << "]\n";
  return kExitOk;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SolverFailure*>(&e) || dynamic_cast<const NonFiniteError*>(&e) ||
      dynamic_cast<const InternalError*>(&e))
    return kExitSolver;
  if (dynamic_cast<const Error*>(&e)) return kExitConfig;
  return kExitSolver;
}

std::string version_string() { return AF_VERSION; }

SpatialGrid make_grid(const ExperimentConfig& cfg) {
  const std::string scalar = cfg.text("grid", "scalar");
  if (scalar == "true") return SpatialGrid::scalar();
  if (scalar != "false") throw ConfigError("[grid] scalar must be true or false");
  const auto n = cfg.integer("grid", "n");
  if (n < 2) throw ConfigError("[grid] n must be >= 2");
  return SpatialGrid(static_cast<std::size_t>(n), cfg.number("grid", "length"));
}

DriftSpec make_drift(const ExperimentConfig& cfg) {
  DriftSpec d;
  d.family = drift_family_from_string(cfg.text("drift", "family"));
  d.p = cfg.number("drift", "p");
  d.p_tilde = cfg.number("drift", "p_tilde");
  d.r = cfg.number("drift", "r");
  d.eta = cfg.number("drift", "eta");
  d.eta1 = cfg.number("drift", "eta1");
  if (cfg.has("drift", "delta")) d.delta_override = cfg.number("drift", "delta");
  if (cfg.has("drift", "K")) d.K_override = cfg.number("drift", "K");
  if (cfg.has("drift", "C")) d.C_override = cfg.number("drift", "C");
  if (cfg.has("drift", "lambda")) d.lambda_override = cfg.number("drift", "lambda");
  d.validate();
  return d;
}

TripleSpec make_triple(const ExperimentConfig& cfg, const DriftSpec& drift) {
  const std::string kind = cfg.text("triple", "kind");
  if (kind == "auto") return drift.natural_triple();
  TripleSpec t;
  switch (triple_kind_from_string(kind)) {
    case TripleKind::RDE: t = TripleSpec::rde(); break;
    case TripleKind::PME: t = TripleSpec::pme(drift.r); break;
    case TripleKind::PLE: t = TripleSpec::ple(drift.p); break;
    case TripleKind::POINTWISE: t = TripleSpec::pointwise(drift.p); break;
  }
  t.validate();
  return t;
}

NoiseSpec make_noise_spec(const ExperimentConfig& cfg) {
  NoiseSpec s;
  s.kind = noise_kind_from_string(cfg.text("noise", "kind"));
  if (cfg.has("noise", "weights")) {
    s.mode_weights = cfg.numbers("noise", "weights");
  } else if (s.kind != NoiseKind::Zero && s.kind != NoiseKind::Levy) {
    const auto modes = cfg.integer("noise", "modes");
    if (modes < 1) throw ConfigError("[noise] modes must be >= 1");
    s.mode_weights = NoiseSpec::power_weights(static_cast<std::size_t>(modes),
                                              cfg.number("noise", "decay"),
                                              cfg.number("noise", "scale"));
  }
  s.hurst = cfg.number("noise", "hurst");
  if (cfg.has("noise", "drift")) s.drift_modes = cfg.numbers("noise", "drift");
  s.jump_rate = cfg.number("noise", "jump_rate");
  const auto jm = cfg.integer("noise", "jump_mode");
  if (jm < 1) throw ConfigError("[noise] jump_mode must be >= 1");
  s.jump_mode = static_cast<std::size_t>(jm);
  s.jump_law = jump_law_from_string(cfg.text("noise", "jump_law"));
  s.jump_mean = cfg.number("noise", "jump_mean");
  s.jump_spread = cfg.number("noise", "jump_spread");
  s.validate();
  return s;
}

SolverConfig make_solver(const ExperimentConfig& cfg) {
  SolverConfig s;
  s.dt = cfg.number("solver", "dt");
  s.newton_tol = cfg.number("solver", "newton_tol");
  const auto it = cfg.integer("solver", "newton_max_iters");
  const auto hv = cfg.integer("solver", "step_halving_max");
  if (it < 1 || hv < 0) throw ConfigError("[solver] iteration limits must be nonnegative");
  s.newton_max_iters = static_cast<std::size_t>(it);
  s.step_halving_max = static_cast<std::size_t>(hv);
  s.damping = cfg.number("solver", "damping");
  s.validate();
  return s;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

int run_experiment(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const std::uint64_t seed = opt.seed_override.value_or(cfg.seed());
  ExperimentConfig effective = cfg;
  effective.set("experiment", "seed", std::to_string(seed));
  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + opt.out_dir + "'");
  switch (effective.kind()) {
    case ExperimentKind::Certify: return run_certify(effective, opt, seed, log);
    case ExperimentKind::Simulate: return run_simulate(effective, opt, seed, log);
    case ExperimentKind::Pullback: return run_pullback(effective, opt, seed, log);
    case ExperimentKind::Rates: return run_rates(effective, opt, seed, log);
    case ExperimentKind::NoiseGen: return run_noise_gen(effective, opt, seed, log);
  }
  return kExitConfig;
}

}  // namespace af
