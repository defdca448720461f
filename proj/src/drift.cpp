#include "attractor_forge/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "attractor_forge/errors.hpp"
#include "attractor_forge/kernels.hpp"

namespace af {

namespace {

// sign(x) |x|^q, with sign(0) = 0 so q = 0 gives the sign function.
inline double spow(double x, double q) {
  if (x == 0.0) return 0.0;
  if (q == 1.0) return x;
  const double m = std::pow(std::fabs(x), q);
  return x > 0.0 ? m : -m;
}

// |x|^q regularized as (x^2 + eps^2)^{q/2}.
inline double reg_abs_pow(double x, double q, double eps) {
  if (q == 0.0) return 1.0;
  return std::pow(x * x + eps * eps, 0.5 * q);
}

void check_output(const Field& out, const char* family) {
  const auto vals = out.values();
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (!std::isfinite(vals[i]))
      throw NonFiniteError(std::string("apply_drift(") + family + "): non-finite drift value", i);
}

double pos(double x) { return std::max(x, 0.0); }

}  // namespace

std::string to_string(DriftFamily f) {
  switch (f) {
    case DriftFamily::Pointwise: return "pointwise";
    case DriftFamily::ReactionDiffusion: return "rde";
    case DriftFamily::PorousMedium: return "pme";
    case DriftFamily::PLaplace: return "ple";
  }
  return "?";
}

DriftFamily drift_family_from_string(const std::string& s) {
  if (s == "pointwise") return DriftFamily::Pointwise;
  if (s == "rde") return DriftFamily::ReactionDiffusion;
  if (s == "pme") return DriftFamily::PorousMedium;
  if (s == "ple") return DriftFamily::PLaplace;
  throw ConfigError("unknown drift family '" + s + "'");
}

DriftSpec DriftSpec::pointwise(double p, double eta) {
  DriftSpec s;
  s.family = DriftFamily::Pointwise;
  s.p = p;
  s.eta = eta;
  s.validate();
  return s;
}

DriftSpec DriftSpec::reaction_diffusion(double p, double eta) {
  DriftSpec s;
  s.family = DriftFamily::ReactionDiffusion;
  s.p = p;
  s.eta = eta;
  s.validate();
  return s;
}

DriftSpec DriftSpec::porous_medium(double r, double eta) {
  DriftSpec s;
  s.family = DriftFamily::PorousMedium;
  s.r = r;
  s.eta = eta;
  s.validate();
  return s;
}

DriftSpec DriftSpec::p_laplace(double p, double p_tilde, double eta1, double eta2) {
  DriftSpec s;
  s.family = DriftFamily::PLaplace;
  s.p = p;
  s.p_tilde = p_tilde;
  s.eta1 = eta1;
  s.eta = eta2;
  s.validate();
  return s;
}

void DriftSpec::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(eta) || !finite(eta1)) throw ConfigError("drift: eta must be finite");
  switch (family) {
    case DriftFamily::Pointwise:
      if (!(p >= 2.0) || !finite(p)) throw ConfigError("pointwise drift needs p >= 2");
      break;
    case DriftFamily::ReactionDiffusion:
      if (!(p >= 1.0) || !finite(p)) throw ConfigError("reaction-diffusion drift needs p >= 1");
      break;
    case DriftFamily::PorousMedium:
      if (!(r > 1.0) || !finite(r)) throw ConfigError("porous medium drift needs r > 1");
      break;
    case DriftFamily::PLaplace:
      if (!(p > 2.0) || !finite(p)) throw ConfigError("p-Laplace drift needs 2 < p < inf");
      if (!(p_tilde >= 1.0 && p_tilde <= p)) throw ConfigError("p-Laplace drift needs 1 <= p~ <= p");
      if (!(eta1 >= 0.0)) throw ConfigError("p-Laplace drift needs eta1 >= 0");
      break;
  }
}

bool DriftSpec::strongly_monotone() const {
  if (family == DriftFamily::Pointwise && p == 2.0) return eta < 1.0;
  return eta <= 0.0;
}

TripleSpec DriftSpec::natural_triple() const {
  switch (family) {
    case DriftFamily::Pointwise: return TripleSpec::pointwise(p);
    case DriftFamily::ReactionDiffusion: return TripleSpec::rde();
    case DriftFamily::PorousMedium: return TripleSpec::pme(r);
    case DriftFamily::PLaplace: return TripleSpec::ple(p);
  }
  return TripleSpec::rde();
}

double embedding_constant_HV(const TripleSpec& triple, const SpatialGrid& grid) {
  const double m = grid.measure();
  switch (triple.kind) {
    case TripleKind::RDE: return 1.0;
    case TripleKind::POINTWISE:
    case TripleKind::PLE: return std::pow(m, 0.5 - 1.0 / triple.exponent);
    case TripleKind::PME: {
      const double r = triple.exponent;
      return std::pow(m, (r - 1.0) / (2.0 * (r + 1.0))) / std::sqrt(grid.principal_eigenvalue());
    }
  }
  return 1.0;
}

DriftConstants resolve_constants(const DriftSpec& spec, const SpatialGrid& grid) {
  spec.validate();
  DriftConstants c;
  const double m = grid.measure();
  const double L = grid.length();
  const double mu1 = grid.principal_eigenvalue();
  const double eta = spec.eta;
  switch (spec.family) {
    case DriftFamily::Pointwise: {
      const double p = spec.p;
      c.alpha = p;
      c.delta = 2.0;
      c.K = 2.0 * pos(eta);
      c.C = std::max(2.0 * pos(eta), 1.0 + std::fabs(eta) * std::pow(m, 1.0 - 2.0 / p));
      c.beta = p;
      c.lambda = p == 2.0 ? 2.0 * (1.0 - eta) : std::pow(2.0, 3.0 - p) * std::pow(m, 1.0 - p / 2.0);
      break;
    }
    case DriftFamily::ReactionDiffusion: {
      const double p = spec.p;
      c.alpha = 2.0;
      c.delta = 2.0 * mu1 / (mu1 + 1.0);
      c.K = 2.0 * pos(eta);
      c.C = p <= 2.0 ? std::max(2.0 * pos(eta), 2.0 + std::fabs(eta) + std::sqrt(m)) : 2.0 * pos(eta);
      c.beta = 2.0;
      c.lambda = 2.0 * (mu1 - eta) + (p == 2.0 ? 2.0 : 0.0);
      break;
    }
    case DriftFamily::PorousMedium: {
      const double r = spec.r;
      const double emb = embedding_constant_HV(TripleSpec::pme(r), grid);
      c.alpha = r + 1.0;
      c.delta = 2.0;
      c.K = 2.0 * pos(eta);
      c.C = std::max(2.0 * pos(eta), 1.0 + std::fabs(eta) * emb * emb);
      c.beta = r + 1.0;
      c.lambda = std::pow(2.0, 1.0 - r);
      break;
    }
    case DriftFamily::PLaplace: {
      const double p = spec.p;
      c.alpha = p;
      c.delta = 2.0 / (1.0 + std::pow(L, p) / p);
      c.K = 2.0 * pos(eta);
      c.C = std::max(2.0 * pos(eta), 1.0 + spec.eta1 + spec.eta1 * std::pow(m, 1.0 - 1.0 / p) +
                                         std::fabs(eta) * std::pow(m, 1.0 - 2.0 / p));
      c.beta = p;
      c.lambda = std::pow(2.0, 3.0 - p) * std::pow(L, 1.0 - p / 2.0) * std::pow(mu1, p / 2.0);
      break;
    }
  }
  if (!spec.strongly_monotone()) c.lambda = 0.0;
  if (spec.delta_override) c.delta = *spec.delta_override;
  if (spec.K_override) c.K = *spec.K_override;
  if (spec.C_override) c.C = *spec.C_override;
  if (spec.lambda_override) c.lambda = *spec.lambda_override;
  return c;
}

Field apply_drift(const DriftSpec& spec, const Field& v) {
  v.require_finite("apply_drift");
  const std::size_t n = v.size();
  const double h = v.grid().spacing();
  const auto in = v.values();
  Field out(v.grid());
  auto o = out.values();
  switch (spec.family) {
    case DriftFamily::Pointwise:
      for (std::size_t i = 0; i < n; ++i) o[i] = -spow(in[i], spec.p - 1.0) + spec.eta * in[i];
      check_output(out, "pointwise");
      break;
    case DriftFamily::ReactionDiffusion:
      kernels::laplacian(in, o, 1.0 / (h * h));
      for (std::size_t i = 0; i < n; ++i) o[i] += -spow(in[i], spec.p - 1.0) + spec.eta * in[i];
      check_output(out, "rde");
      break;
    case DriftFamily::PorousMedium: {
      std::vector<double> phi(n);
      for (std::size_t i = 0; i < n; ++i) phi[i] = spow(in[i], spec.r);
      kernels::laplacian(phi, o, 1.0 / (h * h));
      kernels::axpy(spec.eta, in, o);
      check_output(out, "pme");
      break;
    }
    case DriftFamily::PLaplace: {
      // flux on the n+1 cells, boundary values zero
      std::vector<double> flux(n + 1);
      for (std::size_t e = 0; e <= n; ++e) {
        const double left = e > 0 ? in[e - 1] : 0.0;
        const double right = e < n ? in[e] : 0.0;
        flux[e] = spow((right - left) / h, spec.p - 1.0);
      }
      for (std::size_t i = 0; i < n; ++i)
        o[i] = (flux[i + 1] - flux[i]) / h - spec.eta1 * spow(in[i], spec.p_tilde - 1.0) +
               spec.eta * in[i];
      check_output(out, "ple");
      break;
    }
  }
  return out;
}

Tridiagonal drift_jacobian(const DriftSpec& spec, const Field& v, double eps) {
  const std::size_t n = v.size();
  const double h = v.grid().spacing();
  const double inv_h2 = 1.0 / (h * h);
  const auto in = v.values();
  Tridiagonal J(n);
  switch (spec.family) {
    case DriftFamily::Pointwise:
      for (std::size_t i = 0; i < n; ++i)
        J.diag[i] = -(spec.p - 1.0) * reg_abs_pow(in[i], spec.p - 2.0, eps) + spec.eta;
      break;
    case DriftFamily::ReactionDiffusion:
      for (std::size_t i = 0; i < n; ++i) {
        J.lower[i] = inv_h2;
        J.upper[i] = inv_h2;
        J.diag[i] = -2.0 * inv_h2 - (spec.p - 1.0) * reg_abs_pow(in[i], spec.p - 2.0, eps) + spec.eta;
      }
      break;
    case DriftFamily::PorousMedium: {
      std::vector<double> dphi(n);
      for (std::size_t i = 0; i < n; ++i) dphi[i] = spec.r * reg_abs_pow(in[i], spec.r - 1.0, eps);
      for (std::size_t i = 0; i < n; ++i) {
        J.diag[i] = -2.0 * inv_h2 * dphi[i] + spec.eta;
        if (i > 0) J.lower[i] = inv_h2 * dphi[i - 1];
        if (i + 1 < n) J.upper[i] = inv_h2 * dphi[i + 1];
      }
      break;
    }
    case DriftFamily::PLaplace: {
      std::vector<double> dflux(n + 1);
      for (std::size_t e = 0; e <= n; ++e) {
        const double left = e > 0 ? in[e - 1] : 0.0;
        const double right = e < n ? in[e] : 0.0;
        dflux[e] = (spec.p - 1.0) * reg_abs_pow((right - left) / h, spec.p - 2.0, eps);
      }
      for (std::size_t i = 0; i < n; ++i) {
        J.lower[i] = dflux[i] * inv_h2;
        J.upper[i] = dflux[i + 1] * inv_h2;
        J.diag[i] = -(dflux[i] + dflux[i + 1]) * inv_h2 -
                    spec.eta1 * (spec.p_tilde - 1.0) * reg_abs_pow(in[i], spec.p_tilde - 2.0, eps) +
                    spec.eta;
      }
      break;
    }
  }
  return J;
}

double drift_pairing(const Field& Av, const Field& w, const TripleSpec& triple) {
  if (triple.kind == TripleKind::PME) return l2_inner(inverse_dirichlet_laplacian(Av), w);
  return dual_pairing(Av, w, triple);
}

std::pair<double, double> powerlaw_gap(std::span<const double> a, std::span<const double> b,
                                       double r) {
  if (a.size() != b.size()) throw DomainError("powerlaw_gap: length mismatch");
  double na = 0.0, nb = 0.0, nd = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i] * a[i];
    nb += b[i] * b[i];
    const double d = a[i] - b[i];
    nd += d * d;
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  nd = std::sqrt(nd);
  const double sa = r == 0.0 ? 1.0 : std::pow(na, r);
  const double sb = r == 0.0 ? 1.0 : std::pow(nb, r);
  double lhs = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) lhs += (sa * a[i] - sb * b[i]) * (a[i] - b[i]);
  const double rhs = std::pow(2.0, -r) * std::pow(nd, r + 2.0);
  return {lhs, rhs};
}

Field yosida_apply(std::size_t n, const Field& v) {
  if (n == 0) throw DomainError("yosida_apply: n must be positive");
  v.require_finite("yosida_apply");
  const std::size_t m = v.size();
  const double h = v.grid().spacing();
  const double c = 1.0 / (static_cast<double>(n) * h * h);
  Tridiagonal M(m);
  for (std::size_t i = 0; i < m; ++i) {
    M.diag[i] = 1.0 + 2.0 * c;
    M.lower[i] = -c;
    M.upper[i] = -c;
  }
  const std::vector<double> w = solve_tridiagonal(M, v.values());
  Field out(v.grid());
  auto o = out.values();
  const auto in = v.values();
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < m; ++i) o[i] = nn * (in[i] - w[i]);
  return out;
}

double norm_n(std::size_t n, const Field& v, const TripleSpec& triple) {
  const double q = inner_H(v, yosida_apply(n, v), triple);
  const double scale = std::max(1.0, l2_inner(v, v) * static_cast<double>(n));
  if (q < -1e-12 * scale)
    throw InternalError("norm_n: negative quadratic form " + std::to_string(q));
  return std::sqrt(std::max(q, 0.0));
}

Field FieldSampler::draw(const SpatialGrid& grid, Rng& rng) const {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const std::size_t K = std::min(grid.n_interior(), max_modes);
  std::vector<double> coeff(K);
  for (std::size_t k = 0; k < K; ++k)
    coeff[k] = amplitude * unif(rng) * std::pow(static_cast<double>(k + 1), -decay);
  Field out(grid);
  const double w = std::numbers::pi / grid.length();
  for (std::size_t i = 0; i < grid.n_interior(); ++i) {
    const double x = grid.node(i);
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += coeff[k] * std::sin(w * static_cast<double>(k + 1) * x);
    out[i] = s;
  }
  return out;
}

namespace {

Field dual_representative(const DriftSpec& spec, const TripleSpec& triple, const Field& v) {
  Field g = apply_drift(spec, v);
  if (triple.kind == TripleKind::PME) g = inverse_dirichlet_laplacian(g);
  return g;
}

double ratio(const Field& g, const Field& phi, const TripleSpec& triple) {
  const double nv = norm_V(phi, triple);
  if (!(nv > 0.0)) return 0.0;
  return std::fabs(l2_inner(g, phi)) / nv;
}

}  // namespace

double dual_ratio_max(const Field& g, const TripleSpec& triple, std::span<const Field> directions) {
  double best = 0.0;
  for (const Field& phi : directions) best = std::max(best, ratio(g, phi, triple));
  return best;
}

double dual_norm_estimate(const DriftSpec& spec, const TripleSpec& triple, const Field& v,
                          std::size_t directions, std::uint64_t seed) {
  const Field g = dual_representative(spec, triple, v);
  if (kernels::max_abs(g.values()) == 0.0) return 0.0;
  const SpatialGrid& grid = v.grid();
  const std::size_t n = grid.n_interior();

  double best = 0.0;
  Field best_phi(grid);
  auto consider = [&](const Field& phi) {
    const double r = ratio(g, phi, triple);
    if (r > best) {
      best = r;
      best_phi = phi;
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    Field e(grid);
    e[i] = 1.0;
    consider(e);
  }
  Rng rng = derived_rng(seed, {0x6475616cULL});
  const FieldSampler sampler;
  for (std::size_t d = 0; d < directions; ++d) consider(sampler.draw(grid, rng));

  // duality-map candidates sign(g)|g|^q, plus the Riesz representative of g
  // in the gradient geometry
  std::vector<Field> bases{g};
  if (triple.kind == TripleKind::RDE || triple.kind == TripleKind::PLE)
    bases.push_back(inverse_dirichlet_laplacian(g));
  for (const Field& base : bases) {
    for (double q : {0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0}) {
      Field phi(grid);
      for (std::size_t i = 0; i < n; ++i) phi[i] = spow(base[i], q);
      consider(phi);
    }
  }

  // random refinement around the incumbent
  std::normal_distribution<double> normal(0.0, 1.0);
  double sigma = 0.3;
  for (int iter = 0; iter < 300; ++iter) {
    const double scale = sigma * kernels::max_abs(best_phi.values());
    Field trial = best_phi;
    for (std::size_t i = 0; i < n; ++i) trial[i] += scale * normal(rng);
    const double before = best;
    consider(trial);
    if (best == before && iter % 30 == 29) sigma *= 0.5;
  }
  return best;
}

}  // namespace af
