#pragma once

#include <string>
#include <vector>

#include "goalgen/baselines.hpp"
#include "goalgen/curriculum.hpp"
#include "goalgen/sagg_riac.hpp"
#include "goalgen/trpo.hpp"

namespace goalgen {

enum class Method {
  goalgan,
  goalgan_true_label,
  gan_fit_all,
  uniform,
  uniform_l2,
  oracle,
  sagg_riac,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct EnvOverrides {
  std::string kind = "multipath-maze";
  std::size_t n = 2;
  int horizon = 400;
  double dt = 0.02;
  double tolerance = -1.0;  // < 0: environment default
};

struct PolicyConfig {
  std::vector<std::size_t> hidden{32, 32};
  double init_log_std = 0.0;
};

struct EvalConfig {
  int cadence = 5;  // coverage evaluation every this many outer iterations
  int rollouts_per_goal = 1;
  int final_rollouts_per_goal = 4;
  double grid_resolution_maze = 0.5;
  double grid_resolution_ndim = 1.0;
  int max_points_per_dim = 4;  // applies for n >= 4
  bool render_svg = true;
};

// Full experiment description. Defaults reproduce the stock hyperparameters
// (gamma 0.998, lambda 0.995, thresholds 0.1/0.9, noise dim 4, generator
// 2x128, discriminator 2x256, policy 2x32 tanh, 5x100 episodes, 200 GAN
// iterations).
struct ExperimentConfig {
  Method method = Method::goalgan;
  EnvOverrides env;
  int iterations = 100;
  std::uint64_t seed = 0;
  std::string output_dir = "runs";
  int workers = 1;  // run-level parallelism for sweeps
  RlConfig rl;
  GoidThresholds goid;
  GanConfig gan;
  GoalMixture mixture;
  std::string pretrained_gan;  // when set, initialize_gan is skipped
  PolicyConfig policy;
  SaggRiacConfig sagg;
  RejectionOracleConfig oracle;
  EvalConfig eval;

  void validate() const;
};

// File values override the defaults; an empty path yields pure defaults.
// Unknown or mistyped keys are rejected with their full key path.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Serialized into the run manifest so no default stays hidden.
std::string config_to_json(const ExperimentConfig& cfg);

EnvConfig build_env(const ExperimentConfig& cfg);

// e.g. "goalgan_maze_seed0" / "uniform_pm4d_seed2"; used in artifact names.
std::string run_tag(const ExperimentConfig& cfg);
std::string env_tag(const ExperimentConfig& cfg);

}  // namespace goalgen
