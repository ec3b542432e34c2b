#pragma once

#include <optional>
#include <vector>

#include "goalgen/goal_gan.hpp"
#include "goalgen/rollout.hpp"
#include "goalgen/trpo.hpp"

namespace goalgen {

// Uniform over the full goal-space box (not the feasible subset).
std::vector<Vec> uniform_goals(const GoalSpace& space, std::size_t count,
                               Rng& rng);

// Uniform over the feasible region, by rejection against is_feasible.
std::vector<Vec> uniform_feasible_goals(const EnvConfig& config,
                                        std::size_t count, Rng& rng);

// Dense shaping for the L2 baseline: negative distance to the goal.
double l2_dense_reward(const EnvState& next_state, const Vec& goal,
                       const GoalSpace& space);

// The fit-all ablation labels every attempted goal positive.
std::vector<LabeledGoal> gan_fit_all_labels(const SuccessTable& table);

struct RejectionOracleConfig {
  int rollouts_per_candidate = 4;
  int candidate_budget = 2000;
};

struct RejectionOracleResult {
  std::vector<Vec> goals;                // accepted goals
  std::vector<double> estimates;         // their recorded success estimates
  std::uint64_t rollouts_spent = 0;      // the oracle's labeling cost
  int candidates_tested = 0;
  bool budget_exhausted = false;
};

// Upper-bound baseline: uniform feasible candidates kept only when fresh
// rollouts put their success estimate inside [r_min, r_max].
RejectionOracleResult rejection_sample_goid(
    const Agent& policy, const EnvConfig& env, const GoidThresholds& thresholds,
    const RejectionOracleConfig& config, std::size_t count,
    EpisodeSeeder& seeder, Rng& rng);

// Labels from three fresh evaluation rollouts per goal under the current
// policy (the "true label" variant).
std::vector<LabeledGoal> true_label_goals(const Agent& policy,
                                          const std::vector<Vec>& goals,
                                          const GoidThresholds& thresholds,
                                          const EnvConfig& env,
                                          EpisodeSeeder& seeder,
                                          int rollouts_per_goal = 3);

}  // namespace goalgen
