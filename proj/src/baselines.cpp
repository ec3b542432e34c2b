#include "goalgen/baselines.hpp"

#include <stdexcept>

namespace goalgen {

std::vector<Vec> uniform_goals(const GoalSpace& space, std::size_t count,
                               Rng& rng) {
  if (count == 0) throw std::invalid_argument("uniform_goals: count must be > 0");
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec g(space.dim);
    for (std::size_t d = 0; d < space.dim; ++d) {
      g[d] = uniform(rng, space.lo[d], space.hi[d]);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<Vec> uniform_feasible_goals(const EnvConfig& config,
                                        std::size_t count, Rng& rng) {
  std::vector<Vec> out;
  out.reserve(count);
  while (out.size() < count) {
    Vec g(config.goal_space.dim);
    for (std::size_t d = 0; d < g.size(); ++d) {
      g[d] = uniform(rng, config.goal_space.lo[d], config.goal_space.hi[d]);
    }
    if (is_feasible(g, config)) out.push_back(std::move(g));
  }
  return out;
}

double l2_dense_reward(const EnvState& next_state, const Vec& goal,
                       const GoalSpace& space) {
  (void)space;
  return -euclidean(next_state.position, goal);
}

std::vector<LabeledGoal> gan_fit_all_labels(const SuccessTable& table) {
  std::vector<LabeledGoal> out;
  out.reserve(table.size());
  for (const auto& [goal, stats] : table) {
    out.push_back(LabeledGoal{goal, stats.fraction(), 1});
  }
  return out;
}

RejectionOracleResult rejection_sample_goid(
    const Agent& policy, const EnvConfig& env, const GoidThresholds& thresholds,
    const RejectionOracleConfig& config, std::size_t count,
    EpisodeSeeder& seeder, Rng& rng) {
  thresholds.validate();
  if (config.rollouts_per_candidate < 2) {
    throw std::invalid_argument("rejection oracle needs >= 2 rollouts per candidate");
  }
  RejectionOracleResult result;
  RolloutOptions options;
  while (result.goals.size() < count &&
         result.candidates_tested < config.candidate_budget) {
    const Vec goal = uniform_feasible_goals(env, 1, rng)[0];
    ++result.candidates_tested;
    int successes = 0;
    for (int k = 0; k < config.rollouts_per_candidate; ++k) {
      Rng ep_rng(seeder.next_seed());
      const Trajectory traj = run_episode(policy, nullptr, goal, env, options, ep_rng);
      successes += traj.success ? 1 : 0;
      ++result.rollouts_spent;
    }
    const double estimate =
        double(successes) / double(config.rollouts_per_candidate);
    if (thresholds.r_min <= estimate && estimate <= thresholds.r_max) {
      result.goals.push_back(goal);
      result.estimates.push_back(estimate);
    }
  }
  result.budget_exhausted = result.goals.size() < count;
  return result;
}

std::vector<LabeledGoal> true_label_goals(const Agent& policy,
                                          const std::vector<Vec>& goals,
                                          const GoidThresholds& thresholds,
                                          const EnvConfig& env,
                                          EpisodeSeeder& seeder,
                                          int rollouts_per_goal) {
  thresholds.validate();
  std::vector<LabeledGoal> out;
  out.reserve(goals.size());
  RolloutOptions options;
  for (const auto& goal : goals) {
    int successes = 0;
    for (int k = 0; k < rollouts_per_goal; ++k) {
      Rng ep_rng(seeder.next_seed());
      const Trajectory traj = run_episode(policy, nullptr, goal, env, options, ep_rng);
      successes += traj.success ? 1 : 0;
    }
    LabeledGoal lg;
    lg.goal = goal;
    lg.fraction = double(successes) / double(rollouts_per_goal);
    lg.label = (thresholds.r_min <= lg.fraction && lg.fraction <= thresholds.r_max)
                   ? 1
                   : 0;
    out.push_back(std::move(lg));
  }
  return out;
}

}  // namespace goalgen
