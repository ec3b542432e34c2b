#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "goalgen/env.hpp"
#include "goalgen/gaussian.hpp"
#include "goalgen/mlp.hpp"
#include "goalgen/rng.hpp"
#include "goalgen/tensor.hpp"

namespace goalgen {

// Anything that can pick actions from observations. Scripted agents in the
// test suite implement this alongside the real policy.
struct Agent {
  virtual ~Agent() = default;
  virtual Vec act(const Vec& obs, Rng& rng, double* log_prob) const = 0;
};

// Goal-conditioned diagonal-Gaussian policy: MLP mean over the observation
// (position, velocity, goal), state-independent learnable log-std.
struct GaussianMlpPolicy final : Agent {
  Mlp net;
  Vec log_std;

  DiagGaussian head(const Vec& obs) const;
  Vec act(const Vec& obs, Rng& rng, double* log_prob) const override;

  // Flat parameter layout: net parameters then log_std.
  std::size_t param_count() const { return net.param_count() + log_std.size(); }
  Vec flat_params() const;
  void set_flat_params(const Vec& flat);
};

GaussianMlpPolicy make_policy(const EnvConfig& config,
                              const std::vector<std::size_t>& hidden,
                              std::uint64_t seed, double init_log_std = 0.0);

Vec make_observation(const EnvState& state, const Vec& goal);

struct TimeStep {
  Vec obs;
  Vec action;
  double reward = 0.0;
  double log_prob = 0.0;
  double value = 0.0;
};

struct Trajectory {
  Vec goal;
  std::vector<TimeStep> steps;
  Vec final_position;  // f(s) after the last step
  bool success = false;
};

enum class RewardMode { indicator, negative_l2 };

struct RolloutOptions {
  RewardMode reward = RewardMode::indicator;
  bool terminate_on_success = true;
  // Generator-proposed goals may fall outside the feasible region; they are
  // attempted anyway and simply earn no success.
  bool require_feasible_goals = false;
};

// Hands each episode its own deterministically derived RNG so parallel and
// serial collection produce identical batches.
struct EpisodeSeeder {
  std::uint64_t stream_seed = 0;
  std::uint64_t counter = 0;
  std::uint64_t next_seed() { return derive_seed(stream_seed, counter++); }
};

Trajectory run_episode(const Agent& policy, const Mlp* value_net,
                       const Vec& goal, const EnvConfig& config,
                       const RolloutOptions& options, Rng& rng);

// Each episode draws its goal uniformly (with replacement) from `goals`.
std::vector<Trajectory> collect_rollouts(const Agent& policy,
                                         const Mlp* value_net,
                                         const std::vector<Vec>& goals,
                                         int episodes, const EnvConfig& config,
                                         const RolloutOptions& options,
                                         EpisodeSeeder& seeder,
                                         int workers = 1);

struct SuccessStats {
  int attempts = 0;
  int successes = 0;
  double fraction() const { return attempts ? double(successes) / attempts : 0.0; }
};

// Keyed by exact goal identity; lexicographic order keeps iteration
// deterministic.
using SuccessTable = std::map<Vec, SuccessStats>;

SuccessTable estimate_success_fractions(const std::vector<Trajectory>& trajectories);
void merge_success_fractions(SuccessTable& into, const std::vector<Trajectory>& trajectories);

}  // namespace goalgen
