#pragma once

// Pathwise solver for Z' = A(Z + N), Z(s) = x - N_s, and the stochastic flow
// S(t,s)x = Z(t) + N_t. Backward Euler in time, damped Newton per step.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "attractor_forge/drift.hpp"
#include "attractor_forge/field_space.hpp"
#include "attractor_forge/noise.hpp"

namespace af {

struct SolverConfig {
  double dt = 1e-3;  // must be an integer multiple of the noise dt
  double newton_tol = 1e-10;
  std::size_t newton_max_iters = 50;
  std::size_t step_halving_max = 8;
  double damping = 1.0;
  // Keep every k-th step (and always the endpoints); 0 keeps the endpoints only.
  std::size_t snapshot_stride = 1;

  void validate() const;
};

struct FlowTrajectory {
  double s = 0.0;
  double t = 0.0;
  std::vector<double> times;
  std::vector<Field> Z;
  std::vector<Field> S;
  // Per stored interval (times[i-1], times[i]]: summed Newton iterations and
  // the smallest accepted sub-step. Entry 0 belongs to the initial snapshot.
  std::vector<std::size_t> newton_iterations;
  std::vector<double> accepted_dt;
  std::size_t halvings = 0;
  std::size_t steps = 0;
};

FlowTrajectory solve_transformed(const DriftSpec& drift, const TripleSpec& triple,
                                 const NoisePath& noise, const Field& x, double s, double t,
                                 const SolverConfig& cfg);

Field flow_map(const DriftSpec& drift, const TripleSpec& triple, const NoisePath& noise,
               const Field& x, double s, double t, const SolverConfig& cfg);

struct CocycleResidual {
  double composition = 0.0;  // ||S(t,r)S(r,s)x - S(t,s)x||_H
  double shift = 0.0;        // ||S(t,s;w)x - S(t-s,0;theta_s w)x||_H
  double value() const { return composition > shift ? composition : shift; }
};

CocycleResidual check_cocycle(const DriftSpec& drift, const TripleSpec& triple,
                              const NoisePath& noise, const Field& x, double s, double r, double t,
                              const SolverConfig& cfg);

// Discrete energy inequality along a trajectory,
//   d|Z|_H^2/dt + delta0/2 |Z|_V^alpha <= -lambda_e |Z|_H^2 + f_t + C_e,
// with delta0 = 2^-alpha delta and f_t = 2K|N_t|_H^2 + C_f (1 + |N_t|_V^alpha),
// evaluated at the right endpoint of every stored interval.
struct EnergySeries {
  double delta0 = 0.0;
  double lambda_e = 0.0;
  double C_e = 0.0;
  double C_f = 0.0;
  std::vector<double> times;
  std::vector<double> dnorm_dt;
  std::vector<double> v_alpha;
  std::vector<double> f;
  std::vector<double> slack;
  double min_slack = 0.0;
  // delta0/2 int |Z|_V^alpha <= |Z_s|_H^2 + int (f + C_e - lambda_e |Z|^2)
  double integrated_lhs = 0.0;
  double integrated_rhs = 0.0;
  double integrated_slack = 0.0;
};

EnergySeries energy_diagnostics(const FlowTrajectory& traj, const DriftSpec& drift,
                                const TripleSpec& triple, const NoisePath& noise,
                                const DriftConstants& constants);

// Columns t,norm_H_S,norm_V_S,norm_S_S,newton_iters.
void write_trajectory_csv(std::ostream& os, const FlowTrajectory& traj, const TripleSpec& triple);

}  // namespace af
