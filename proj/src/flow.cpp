#include "attractor_forge/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "attractor_forge/errors.hpp"

namespace af {

namespace {

struct StepOutcome {
  bool converged = false;
  std::size_t iterations = 0;
};

// Solves Z = Zk + h A(Z + N) in place (Z holds the initial guess).
StepOutcome newton_step(const DriftSpec& drift, const Field& Zk, const Field& N, double h,
                        const SolverConfig& cfg, Field& Z) {
  StepOutcome out;
  const std::size_t n = Z.size();
  auto residual = [&](const Field& z, Field& g) -> bool {
    Field Az = apply_drift(drift, z + N);
    for (std::size_t i = 0; i < n; ++i) g[i] = z[i] - Zk[i] - h * Az[i];
    return g.all_finite();
  };
  Field G(Z.grid());
  if (!residual(Z, G)) return out;
  double gnorm = discrete_l2(G.values());
  // Residuals cannot drop below rounding of the terms that form them.
  const double floor_tol = 64.0 * std::numeric_limits<double>::epsilon() *
                           (discrete_l2(Zk.values()) + discrete_l2(Z.values()) + 1.0);
  const double tol = std::max(cfg.newton_tol, floor_tol);

  Field trial(Z.grid());
  Field Gtrial(Z.grid());
  std::vector<double> rhs(n);
  while (gnorm > tol) {
    if (out.iterations >= cfg.newton_max_iters) return out;
    ++out.iterations;
    Tridiagonal J = drift_jacobian(drift, Z + N);
    for (std::size_t i = 0; i < n; ++i) {
      J.lower[i] *= -h;
      J.upper[i] *= -h;
      J.diag[i] = 1.0 - h * J.diag[i];
      rhs[i] = -G[i];
    }
    std::vector<double> delta;
    try {
      delta = solve_tridiagonal(J, rhs);
    } catch (const InternalError&) {
      return out;
    }
    double lambda = cfg.damping;
    bool accepted = false;
    while (lambda >= 1e-4) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = Z[i] + lambda * delta[i];
      if (residual(trial, Gtrial)) {
        const double tn = discrete_l2(Gtrial.values());
        if (tn < (1.0 - 1e-4 * lambda) * gnorm || tn <= tol) {
          std::swap(Z, trial);
          std::swap(G, Gtrial);
          gnorm = tn;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) return out;
  }
  out.converged = true;
  return out;
}

struct Stepper {
  const DriftSpec& drift;
  const NoisePath& noise;
  const SolverConfig& cfg;
  std::size_t halvings = 0;

  // Advances Z from noise index a to b (b > a). Returns Newton iterations and
  // writes the smallest accepted sub-step into min_dt.
  std::size_t advance(Field& Z, std::size_t a, std::size_t b, std::size_t step_index,
                      double& min_dt) {
    const double h = noise.dt * static_cast<double>(b - a);
    const Field Nb = noise.at(b);
    Field trial = Z;
    StepOutcome o = newton_step(drift, Z, Nb, h, cfg, trial);
    if (o.converged) {
      Z = std::move(trial);
      min_dt = h;
      return o.iterations;
    }
    std::size_t iters = o.iterations;
    const Field Na = noise.at(a);
    for (std::size_t level = 1; level <= cfg.step_halving_max; ++level) {
      ++halvings;
      const std::size_t parts = std::size_t{1} << level;
      const double sub = h / static_cast<double>(parts);
      Field z = Z;
      bool ok = true;
      for (std::size_t j = 1; j <= parts && ok; ++j) {
        // linear interpolation of the noise inside the step
        const double w = static_cast<double>(j) / static_cast<double>(parts);
        Field Nj = j == parts ? Nb : (1.0 - w) * Na + w * Nb;
        Field guess = z;
        StepOutcome so = newton_step(drift, z, Nj, sub, cfg, guess);
        iters += so.iterations;
        if (!so.converged) ok = false;
        else z = std::move(guess);
      }
      if (ok) {
        Z = std::move(z);
        min_dt = sub;
        return iters;
      }
    }
    throw SolverFailure("flow: Newton failed after " + std::to_string(cfg.step_halving_max) +
                            " step halvings",
                        step_index);
  }
};

std::size_t stride_of(const NoisePath& noise, const SolverConfig& cfg) {
  const double q = cfg.dt / noise.dt;
  const double r = std::round(q);
  if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q))
    throw ConfigError("flow: solver dt must be a positive integer multiple of the noise dt");
  return static_cast<std::size_t>(r);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver: dt must be positive");
  if (!(newton_tol > 0.0)) throw ConfigError("solver: newton_tol must be positive");
  if (newton_max_iters == 0) throw ConfigError("solver: newton_max_iters must be positive");
  if (step_halving_max > 12) throw ConfigError("solver: step_halving_max must be <= 12");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("solver: damping must lie in (0,1]");
}

FlowTrajectory solve_transformed(const DriftSpec& drift, const TripleSpec& triple,
                                 const NoisePath& noise, const Field& x, double s, double t,
                                 const SolverConfig& cfg) {
  (void)triple;
  cfg.validate();
  drift.validate();
  if (!(x.grid() == noise.grid)) throw GridMismatchError("flow: field and noise grids differ");
  x.require_finite("flow initial condition");
  if (t < s) throw ConfigError("flow: need s <= t");
  const std::size_t a = noise.index_of(s);
  const std::size_t b = noise.index_of(t);
  const std::size_t m = stride_of(noise, cfg);

  FlowTrajectory traj;
  traj.s = noise.time(a);
  traj.t = noise.time(b);
  const Field Ns = noise.at(a);
  Field Z = x - Ns;
  traj.times.push_back(traj.s);
  traj.Z.push_back(Z);
  traj.S.push_back(x);
  traj.newton_iterations.push_back(0);
  traj.accepted_dt.push_back(0.0);

  Stepper stepper{drift, noise, cfg};
  std::size_t idx = a;
  std::size_t step = 0;
  std::size_t pending_iters = 0;
  double pending_dt = std::numeric_limits<double>::infinity();
  while (idx < b) {
    const std::size_t next = std::min(idx + m, b);
    double min_dt = 0.0;
    pending_iters += stepper.advance(Z, idx, next, step, min_dt);
    pending_dt = std::min(pending_dt, min_dt);
    idx = next;
    ++step;
    const bool keep = idx == b || (cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0);
    if (keep) {
      traj.times.push_back(noise.time(idx));
      Field S = Z + noise.at(idx);
      traj.Z.push_back(Z);
      traj.S.push_back(std::move(S));
      traj.newton_iterations.push_back(pending_iters);
      traj.accepted_dt.push_back(pending_dt);
      pending_iters = 0;
      pending_dt = std::numeric_limits<double>::infinity();
    }
  }
  traj.halvings = stepper.halvings;
  traj.steps = step;
  // S(s,s)x = x exactly, not (x - N_s) + N_s.
  traj.S.front() = x;
  return traj;
}

Field flow_map(const DriftSpec& drift, const TripleSpec& triple, const NoisePath& noise,
               const Field& x, double s, double t, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.snapshot_stride = 0;
  FlowTrajectory traj = solve_transformed(drift, triple, noise, x, s, t, c);
  return traj.S.back();
}

CocycleResidual check_cocycle(const DriftSpec& drift, const TripleSpec& triple,
                              const NoisePath& noise, const Field& x, double s, double r, double t,
                              const SolverConfig& cfg) {
  if (!(s <= r && r <= t)) throw ConfigError("check_cocycle: need s <= r <= t");
  CocycleResidual res;
  const Field direct = flow_map(drift, triple, noise, x, s, t, cfg);
  const Field mid = flow_map(drift, triple, noise, x, s, r, cfg);
  const Field composed = flow_map(drift, triple, noise, mid, r, t, cfg);
  res.composition = norm_H(composed - direct, triple);
  const NoisePath shifted = wiener_shift(noise, s);
  const Field via_shift = flow_map(drift, triple, shifted, x, 0.0, t - s, cfg);
  res.shift = norm_H(via_shift - direct, triple);
  return res;
}

EnergySeries energy_diagnostics(const FlowTrajectory& traj, const DriftSpec& drift,
                                const TripleSpec& triple, const NoisePath& noise,
                                const DriftConstants& k) {
  if (!(k.delta > 0.0) || !(k.alpha > 1.0) || k.C < 0.0 || !std::isfinite(k.C))
    throw ConfigError("energy_diagnostics: certified constants (alpha > 1, delta > 0, C >= 0) required");
  const double alpha = k.alpha;
  EnergySeries e;
  e.delta0 = std::pow(2.0, -alpha) * k.delta;
  // Young: 2C a^{alpha-1} b <= delta/2 a^alpha + c_Y b^alpha
  const double conj = alpha / (alpha - 1.0);
  const double eps = std::pow(conj * k.delta / 2.0, 1.0 / conj);
  const double cY = std::pow(2.0 * k.C / eps, alpha) / alpha;
  e.C_f = 3.0 * k.C + cY + k.delta / 2.0;
  const double c = embedding_constant_HV(triple, noise.grid);
  if (alpha == 2.0) {
    e.lambda_e = e.delta0 / (2.0 * c * c) - 2.0 * k.K;
    e.C_e = 0.0;
  } else {
    // sup_b (2K + lambda_e) b^2 - delta0/2 (b/c)^alpha
    e.lambda_e = e.delta0 / (2.0 * c * c);
    const double a2 = 2.0 * k.K + e.lambda_e;
    const double a1 = e.delta0 / 2.0 * std::pow(c, -alpha);
    const double bstar = std::pow(2.0 * a2 / (alpha * a1), 1.0 / (alpha - 2.0));
    e.C_e = a2 * bstar * bstar - a1 * std::pow(bstar, alpha);
  }
  (void)drift;

  e.min_slack = std::numeric_limits<double>::infinity();
  if (traj.times.size() < 2) {
    e.min_slack = 0.0;
    return e;
  }
  double integral_v = 0.0;
  double integral_rhs = 0.0;
  double prev = std::pow(norm_H(traj.Z[0], triple), 2);
  const double first = prev;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double h = traj.times[i] - traj.times[i - 1];
    const double zz = std::pow(norm_H(traj.Z[i], triple), 2);
    const double va = std::pow(norm_V(traj.Z[i], triple), alpha);
    const Field N = noise.value(traj.times[i]);
    const double f = 2.0 * k.K * std::pow(norm_H(N, triple), 2) +
                     e.C_f * (1.0 + std::pow(norm_V(N, triple), alpha));
    const double d = (zz - prev) / h;
    const double slack = -e.lambda_e * zz + f + e.C_e - e.delta0 / 2.0 * va - d;
    e.times.push_back(traj.times[i]);
    e.dnorm_dt.push_back(d);
    e.v_alpha.push_back(va);
    e.f.push_back(f);
    e.slack.push_back(slack);
    e.min_slack = std::min(e.min_slack, slack);
    integral_v += h * va;
    integral_rhs += h * (f + e.C_e - e.lambda_e * zz);
    prev = zz;
  }
  e.integrated_lhs = e.delta0 / 2.0 * integral_v;
  e.integrated_rhs = first - prev + integral_rhs;
  e.integrated_slack = e.integrated_rhs - e.integrated_lhs;
  return e;
}

void write_trajectory_csv(std::ostream& os, const FlowTrajectory& traj, const TripleSpec& triple) {
  os << "t,norm_H_S,norm_V_S,norm_S_S,newton_iters\n";
  char buf[160];
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Field& S = traj.S[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%zu\n", traj.times[i],
                  norm_H(S, triple), norm_V(S, triple), norm_S(S, triple),
                  traj.newton_iterations[i]);
    os << buf;
  }
}

}  // namespace af
