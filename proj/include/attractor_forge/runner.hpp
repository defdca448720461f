#pragma once

// Batch runner behind the command-line tool: builds the domain objects from an
// ExperimentConfig, runs one experiment and writes its artifacts.

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>

#include "attractor_forge/attractor.hpp"
#include "attractor_forge/config.hpp"

namespace af {

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitConfig = 2, kExitSolver = 3 };

// Exit status for an exception escaping a run.
int exit_code_for(const std::exception& e);

std::string version_string();

SpatialGrid make_grid(const ExperimentConfig& cfg);
DriftSpec make_drift(const ExperimentConfig& cfg);
TripleSpec make_triple(const ExperimentConfig& cfg, const DriftSpec& drift);
NoiseSpec make_noise_spec(const ExperimentConfig& cfg);
SolverConfig make_solver(const ExperimentConfig& cfg);

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
};

// Writes artifacts into out_dir and returns an ExitCode. Library errors
// propagate; the CLI maps them with exit_code_for.
int run_experiment(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log);

// Writes content to path via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace af
