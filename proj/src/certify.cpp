#include <algorithm>
#include <cmath>
#include <limits>

#include "attractor_forge/drift.hpp"
#include "attractor_forge/errors.hpp"
#include "attractor_forge/parallel.hpp"

namespace af {

std::string to_string(ConditionId c) {
  switch (c) {
    case ConditionId::H1: return "H1";
    case ConditionId::H2: return "H2";
    case ConditionId::H2Strong: return "H2'";
    case ConditionId::H3: return "H3";
    case ConditionId::H4: return "H4";
    case ConditionId::H5Cond1: return "H5-cond1";
    case ConditionId::H5Norms: return "H5-norms";
  }
  return "?";
}

ConditionId condition_from_string(const std::string& s) {
  if (s == "H1") return ConditionId::H1;
  if (s == "H2") return ConditionId::H2;
  if (s == "H2'" || s == "H2prime") return ConditionId::H2Strong;
  if (s == "H3") return ConditionId::H3;
  if (s == "H4") return ConditionId::H4;
  if (s == "H5-cond1") return ConditionId::H5Cond1;
  if (s == "H5-norms") return ConditionId::H5Norms;
  throw ConfigError("unknown condition '" + s + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHemicontinuityThreshold = 1e-6;

// Per-trial outcome: the normalized margin and up to two constant estimates.
struct Trial {
  double margin = kInf;
  double est_a = std::numeric_limits<double>::quiet_NaN();
  double est_b = std::numeric_limits<double>::quiet_NaN();
};

double normalized(double slack, std::initializer_list<double> terms) {
  double scale = 1.0;
  for (double t : terms) scale += std::fabs(t);
  return slack / scale;
}

void require_applicable(const DriftSpec& spec, ConditionId cond) {
  switch (cond) {
    case ConditionId::H2Strong:
      if (!spec.strongly_monotone())
        throw ConfigError("H2' needs the eta sign convention of the family (eta <= 0)");
      break;
    case ConditionId::H4:
      if (spec.family == DriftFamily::ReactionDiffusion && spec.p > 2.0)
        throw ConfigError("H4 does not hold with alpha = 2 for a reaction term with p > 2");
      break;
    case ConditionId::H5Cond1:
    case ConditionId::H5Norms:
      if (spec.family == DriftFamily::Pointwise)
        throw ConfigError("H5 needs an intermediate compact space; not available for pointwise drifts");
      break;
    default: break;
  }
}

}  // namespace

ConditionReport certify(const DriftSpec& spec, const TripleSpec& triple, const SpatialGrid& grid,
                        ConditionId cond, const CertifyOptions& opt) {
  spec.validate();
  triple.validate();
  require_applicable(spec, cond);
  if (opt.trials == 0) throw ConfigError("certify: trials must be positive");

  const DriftConstants k = resolve_constants(spec, grid);
  std::vector<Trial> trials(opt.trials);

  auto run_trial = [&](std::size_t t) {
    Rng rng = derived_rng(opt.seed, {static_cast<std::uint64_t>(cond), t});
    Trial& out = trials[t];
    switch (cond) {
      case ConditionId::H1: {
        const Field v1 = opt.sampler.draw(grid, rng);
        const Field v2 = opt.sampler.draw(grid, rng);
        const Field v = opt.sampler.draw(grid, rng);
        auto g = [&](double s) {
          Field arg = v1;
          arg.add_scaled(s, v2);
          return drift_pairing(apply_drift(spec, arg), v, triple);
        };
        // Two-sided differences at widths d and d/10; a continuous map shrinks
        // them linearly, a jump leaves a residual after extrapolation to 0.
        double worst = 0.0;
        for (int j = 0; j <= 100; ++j) {
          const double s = -1.0 + 0.02 * j;
          const double g0 = g(s);
          const double d = 1e-6;
          const double j1 = std::fabs(g(s + d) - g(s - d));
          const double j2 = std::fabs(g(s + d / 10) - g(s - d / 10));
          const double jump = std::max(0.0, (10.0 * j2 - j1) / 9.0) / (1.0 + std::fabs(g0));
          worst = std::max(worst, jump);
        }
        out.margin = kHemicontinuityThreshold - worst;
        out.est_a = worst;
        break;
      }
      case ConditionId::H2:
      case ConditionId::H2Strong: {
        const Field v1 = opt.sampler.draw(grid, rng);
        const Field v2 = opt.identical_pairs ? v1 : opt.sampler.draw(grid, rng);
        const Field w = v1 - v2;
        const double lhs = 2.0 * drift_pairing(apply_drift(spec, v1) - apply_drift(spec, v2), w, triple);
        const double nh = norm_H(w, triple);
        if (cond == ConditionId::H2) {
          const double rhs = k.C * nh * nh;
          out.margin = normalized(rhs - lhs, {lhs, rhs});
          if (nh > 0.0) out.est_a = lhs / (nh * nh);
        } else {
          const double rhs = -k.lambda * std::pow(nh, k.beta);
          out.margin = normalized(rhs - lhs, {lhs, rhs});
          if (nh > 0.0) out.est_a = -lhs / std::pow(nh, k.beta);
        }
        break;
      }
      case ConditionId::H3: {
        const Field v = opt.sampler.draw(grid, rng);
        const double pair = 2.0 * drift_pairing(apply_drift(spec, v), v, triple);
        const double nh = norm_H(v, triple);
        const double nv = std::pow(norm_V(v, triple), k.alpha);
        const double room = k.C + k.K * nh * nh - pair;
        out.margin = normalized(room - k.delta * nv, {k.C, k.K * nh * nh, pair, k.delta * nv});
        if (nv > 0.0) out.est_a = room / nv;
        break;
      }
      case ConditionId::H4: {
        const Field v = opt.sampler.draw(grid, rng);
        const double est = dual_norm_estimate(spec, triple, v, opt.dual_directions,
                                              opt.seed ^ (0x9e3779b97f4a7c15ULL * (t + 1)));
        const double growth = 1.0 + std::pow(norm_V(v, triple), k.alpha - 1.0);
        out.margin = normalized(k.C * growth - est, {k.C * growth, est});
        out.est_a = est / growth;
        break;
      }
      case ConditionId::H5Cond1: {
        const Field v = opt.sampler.draw(grid, rng);
        const Field Av = apply_drift(spec, v);
        double margin = kInf;
        double est = -kInf;
        for (std::size_t n : opt.yosida_levels) {
          const double lhs = 2.0 * drift_pairing(Av, yosida_apply(n, v), triple);
          const double nn = norm_n(n, v, triple);
          const double rhs = k.C * (nn * nn + 1.0);
          margin = std::min(margin, normalized(rhs - lhs, {lhs, rhs}));
          est = std::max(est, lhs / (nn * nn + 1.0));
        }
        out.margin = margin;
        out.est_a = est;
        break;
      }
      case ConditionId::H5Norms: {
        const Field v = opt.sampler.draw(grid, rng);
        const double ns = norm_S(v, triple);
        double margin = kInf;
        double prev = -kInf;
        double last = 0.0;
        for (std::size_t n : opt.yosida_levels) {
          const double nn = norm_n(n, v, triple);
          if (prev > -kInf) margin = std::min(margin, (nn - prev) / (1.0 + ns));
          prev = nn;
          last = nn;
        }
        margin = std::min(margin, (ns - last) / (1.0 + ns));
        out.margin = margin;
        if (ns > 0.0) out.est_a = last / ns;
        break;
      }
    }
  };
  parallel_for(opt.trials, run_trial);

  ConditionReport rep;
  rep.condition = cond;
  rep.trials = opt.trials;
  rep.tolerance = cond == ConditionId::H1 ? 0.0 : opt.tolerance;
  rep.constants = k;
  rep.worst_margin = kInf;
  double a_min = kInf, a_max = -kInf;
  for (const Trial& t : trials) {
    rep.worst_margin = std::min(rep.worst_margin, t.margin);
    if (!std::isnan(t.est_a)) {
      a_min = std::min(a_min, t.est_a);
      a_max = std::max(a_max, t.est_a);
    }
  }
  switch (cond) {
    case ConditionId::H1: rep.estimated_constants["max_jump"] = a_max; break;
    case ConditionId::H2: if (a_max > -kInf) rep.estimated_constants["C_hat"] = a_max; break;
    case ConditionId::H2Strong:
      if (a_min < kInf) rep.estimated_constants["lambda_hat"] = a_min;
      rep.estimated_constants["beta"] = k.beta;
      break;
    case ConditionId::H3:
      if (a_min < kInf) rep.estimated_constants["delta_hat"] = a_min;
      rep.estimated_constants["K"] = k.K;
      rep.estimated_constants["C"] = k.C;
      break;
    case ConditionId::H4: rep.estimated_constants["C_hat"] = a_max; break;
    case ConditionId::H5Cond1: rep.estimated_constants["C_hat"] = a_max; break;
    case ConditionId::H5Norms: rep.estimated_constants["min_ratio_to_S"] = a_min; break;
  }
  rep.satisfied = rep.worst_margin >= -rep.tolerance;
  return rep;
}

}  // namespace af
