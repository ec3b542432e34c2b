#pragma once

#include <functional>
#include <vector>

#include "goalgen/goal_gan.hpp"
#include "goalgen/rollout.hpp"
#include "goalgen/trpo.hpp"

namespace goalgen {

// Stored goals keep pairwise separation > eps (same metric and tolerance as
// the goal space), so the buffer spreads over everything reached so far
// instead of piling up in one spot.
struct ReplayBuffer {
  double eps = 0.3;
  std::vector<Vec> goals;

  // Inserts iff the distance to every stored goal exceeds eps.
  bool insert(const Vec& goal);
  std::size_t size() const { return goals.size(); }
};

// Processes candidates in order, inserting the ones that keep the separation
// invariant.
void update_replay(ReplayBuffer& buffer, const std::vector<Vec>& new_goals);

struct GoalMixture {
  std::size_t from_gan = 200;
  std::size_t from_replay = 100;
};

struct SampledGoals {
  std::vector<Vec> training_goals;  // gan goals followed by replay goals
  std::vector<Vec> gan_goals;       // generation order, feeds update_replay
  std::size_t n_replay = 0;
};

// 200 generator goals plus 100 uniform draws from the replay buffer; a short
// buffer contributes everything it has and the generator fills the rest.
SampledGoals sample_training_goals(const GanPair& gan, const GoalSpace& space,
                                   const ReplayBuffer& buffer,
                                   const GoalMixture& mixture, Rng& gan_rng,
                                   Rng& replay_rng);

// Produces the labels fed to train_gan for one iteration. The main method
// labels the policy-update table; variants (fit-all, true-label) inject a
// different labeler but share every other code path.
using Labeler = std::function<std::vector<LabeledGoal>(
    const SuccessTable& table, const GaussianMlpPolicy& policy,
    const std::vector<Vec>& attempted_goals)>;

struct CurriculumState {
  long iteration = 0;
  GaussianMlpPolicy policy;
  Mlp value_net;
  Adam value_adam;
  GanPair gan;
  ReplayBuffer replay;
  GoidThresholds thresholds;
  GoalMixture mixture;
  GanConfig gan_config;
  EpisodeSeeder rollout_seeder;
  Rng gan_noise_rng;
  Rng gan_train_rng;
  Rng replay_rng;
  Rng value_rng;
  std::uint64_t env_steps = 0;
};

struct IterationRecord {
  long iteration = 0;
  std::uint64_t env_steps = 0;
  double goid_fraction = 0.0;  // share of labeled goals with y = 1
  std::size_t buffer_size = 0;
  std::size_t n_labeled = 0;
  double disc_loss = 0.0;
  double gen_loss = 0.0;
  bool gan_skipped = false;
  double mean_success = 0.0;
  double mean_kl = 0.0;
  double surrogate_improvement = 0.0;
  std::vector<TrpoResult> trpo_steps;
};

// One pass of the generative goal learning loop: sample training goals,
// update the policy, label the update's own rollouts, train the GAN, refresh
// the replay buffer. Runs on a scratch copy and commits on success, so a
// throwing sub-step leaves `state` untouched.
IterationRecord run_outer_iteration(CurriculumState& state, const EnvConfig& env,
                                    const RlConfig& rl, const Labeler& labeler);

}  // namespace goalgen
