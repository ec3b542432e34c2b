#pragma once

#include <string>
#include <vector>

#include "goalgen/config.hpp"
#include "goalgen/eval.hpp"

namespace goalgen {

struct RunResult {
  std::string curve_path;
  std::string manifest_path;
  std::string policy_path;
  std::vector<CurvePoint> curve;
  double final_coverage = 0.0;       // final_rollouts_per_goal estimate
  std::uint64_t env_steps = 0;
  std::uint64_t labeling_rollouts = 0;  // summed over iterations
  double wall_seconds = 0.0;
};

// One experiment: N outer iterations of the selected method with periodic
// coverage evaluation and artifact emission. Deterministic given the seed
// when rollout_workers == 1.
RunResult run_experiment(const ExperimentConfig& cfg);

// Coverage of a saved policy checkpoint.
CoverageReport evaluate_checkpoint(const std::string& policy_path,
                                   const ExperimentConfig& cfg);

}  // namespace goalgen
