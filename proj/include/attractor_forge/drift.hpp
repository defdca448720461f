#pragma once

// Monotone drift operators A: V -> V* for the four example families, their
// Newton Jacobians, and numerical certification of the structural conditions
// (hemicontinuity, monotonicity, strong monotonicity, coercivity, growth, and
// the Yosida-type regularity condition).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attractor_forge/field_space.hpp"
#include "attractor_forge/random.hpp"
#include "attractor_forge/tridiagonal.hpp"

namespace af {

enum class DriftFamily {
  Pointwise,         // -|v|^{p-2} v + eta v
  ReactionDiffusion, // Delta v - |v|^{p-2} v + eta v
  PorousMedium,      // Delta(|v|^{r-1} v) + eta v
  PLaplace,          // div(|grad v|^{p-2} grad v) - eta1 |v|^{pt-2} v + eta2 v
};

std::string to_string(DriftFamily f);
DriftFamily drift_family_from_string(const std::string& s);

// alpha/delta/K/C: coercivity and growth; lambda/beta: strong monotonicity.
// A single C bounds the monotonicity defect, the coercivity constant, the
// growth constant and the Yosida condition at once.
struct DriftConstants {
  double alpha = 2.0;
  double delta = 0.0;
  double K = 0.0;
  double C = 0.0;
  double lambda = 0.0;
  double beta = 2.0;
};

struct DriftSpec {
  DriftFamily family = DriftFamily::ReactionDiffusion;
  double p = 2.0;        // Pointwise, ReactionDiffusion, PLaplace
  double p_tilde = 2.0;  // PLaplace absorption exponent
  double r = 2.0;        // PorousMedium
  double eta = 0.0;      // linear term (eta2 for PLaplace)
  double eta1 = 0.0;     // PLaplace absorption weight

  // Optional overrides of the derived constants (e.g. to inject a wrong
  // lambda and watch the bound checks fail).
  std::optional<double> delta_override;
  std::optional<double> K_override;
  std::optional<double> C_override;
  std::optional<double> lambda_override;

  static DriftSpec pointwise(double p, double eta);
  static DriftSpec reaction_diffusion(double p, double eta);
  static DriftSpec porous_medium(double r, double eta);
  static DriftSpec p_laplace(double p, double p_tilde, double eta1, double eta2);

  // Throws ConfigError on parameters outside the family's range.
  void validate() const;
  // Whether strong monotonicity holds (the eta sign convention).
  bool strongly_monotone() const;
  TripleSpec natural_triple() const;
};

// Constants valid on the given grid, derived from discrete Poincare/Jensen
// inequalities (and the overrides, when set).
DriftConstants resolve_constants(const DriftSpec& spec, const SpatialGrid& grid);

// Best constant c with ||v||_H <= c ||v||_V on this grid for the triple.
double embedding_constant_HV(const TripleSpec& triple, const SpatialGrid& grid);

// A(v) as a field; for the porous medium family the result is the L^2 density
// of Delta(Phi(v)) + eta v and is paired in the H^{-1} geometry by callers.
Field apply_drift(const DriftSpec& spec, const Field& v);

// dA/dv at v as a tridiagonal matrix. |.|^{q} factors with q < 1 are
// regularized by (v^2 + eps^2)^{q/2}; the residual never is.
Tridiagonal drift_jacobian(const DriftSpec& spec, const Field& v, double eps = 1e-10);

// V*<A(v), w>_V in the triple geometry: L^2 pairing, except PME which pairs
// (-Delta)^{-1} A(v) with w.
double drift_pairing(const Field& Av, const Field& w, const TripleSpec& triple);

// Both sides of <|a|^r a - |b|^r b, a - b> >= 2^{-r} |a - b|^{r+2}.
std::pair<double, double> powerlaw_gap(std::span<const double> a, std::span<const double> b,
                                       double r);

// T_n v = n (v - (I - Delta_h/n)^{-1} v)
Field yosida_apply(std::size_t n, const Field& v);
// sqrt(<v, T_n v>_H) in the triple's pivot geometry.
double norm_n(std::size_t n, const Field& v, const TripleSpec& triple);

// Random-field law: sum_{k<=K} a_k sin(k pi x/L), a_k ~ U[-1,1] amplitude k^{-decay}.
struct FieldSampler {
  double amplitude = 1.0;
  double decay = 2.0;
  std::size_t max_modes = 32;

  Field draw(const SpatialGrid& grid, Rng& rng) const;
};

// Lower bound on ||A(v)||_{V*}: max over trial directions phi of
// <A(v), phi>/||phi||_V. Directions are the coordinate basis, `directions`
// sampled fields, power transforms of the dual representative, and a short
// random refinement around the best direction.
// max over the given directions of |<g, phi>|/||phi||_V for a dual
// representative g (already mapped to the L^2 pairing).
double dual_ratio_max(const Field& g, const TripleSpec& triple, std::span<const Field> directions);

double dual_norm_estimate(const DriftSpec& spec, const TripleSpec& triple, const Field& v,
                          std::size_t directions, std::uint64_t seed);

enum class ConditionId { H1, H2, H2Strong, H3, H4, H5Cond1, H5Norms };

std::string to_string(ConditionId c);
ConditionId condition_from_string(const std::string& s);

struct ConditionReport {
  ConditionId condition = ConditionId::H1;
  std::size_t trials = 0;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  std::map<std::string, double> estimated_constants;
  DriftConstants constants;  // the declared constants the margins refer to
  bool satisfied = false;
};

struct CertifyOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  FieldSampler sampler{};
  double tolerance = 1e-10;
  // H2 only: evaluate on identical argument pairs.
  bool identical_pairs = false;
  std::vector<std::size_t> yosida_levels{1, 2, 4, 8, 16, 32, 64, 128, 256};
  std::size_t dual_directions = 200;
};

ConditionReport certify(const DriftSpec& spec, const TripleSpec& triple, const SpatialGrid& grid,
                        ConditionId condition, const CertifyOptions& options = {});

}  // namespace af
