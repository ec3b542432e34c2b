#include "goalgen/curriculum.hpp"

#include <algorithm>
#include <numeric>

namespace goalgen {

bool ReplayBuffer::insert(const Vec& goal) {
  for (const auto& g : goals) {
    if (euclidean(g, goal) <= eps) return false;
  }
  goals.push_back(goal);
  return true;
}

void update_replay(ReplayBuffer& buffer, const std::vector<Vec>& new_goals) {
  for (const auto& g : new_goals) buffer.insert(g);
}

SampledGoals sample_training_goals(const GanPair& gan, const GoalSpace& space,
                                   const ReplayBuffer& buffer,
                                   const GoalMixture& mixture, Rng& gan_rng,
                                   Rng& replay_rng) {
  SampledGoals out;
  const std::size_t total = mixture.from_gan + mixture.from_replay;
  out.n_replay = std::min(mixture.from_replay, buffer.size());
  const std::size_t n_gan = total - out.n_replay;

  out.gan_goals = sample_goals(gan, space, n_gan, gan_rng);
  out.training_goals = out.gan_goals;
  if (out.n_replay == buffer.size()) {
    out.training_goals.insert(out.training_goals.end(), buffer.goals.begin(),
                              buffer.goals.end());
  } else {
    // Uniform draw without replacement via a partial Fisher-Yates pass.
    std::vector<std::size_t> idx(buffer.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < out.n_replay; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(replay_rng)]);
      out.training_goals.push_back(buffer.goals[idx[i]]);
    }
  }
  return out;
}

IterationRecord run_outer_iteration(CurriculumState& state, const EnvConfig& env,
                                    const RlConfig& rl, const Labeler& labeler) {
  CurriculumState next = state;
  IterationRecord rec;

  const SampledGoals sampled =
      sample_training_goals(next.gan, env.goal_space, next.replay, next.mixture,
                            next.gan_noise_rng, next.replay_rng);

  RolloutOptions options;  // indicator reward, early termination
  const PolicyUpdateStats stats =
      update_policy(next.policy, next.value_net, next.value_adam,
                    sampled.training_goals, env, rl, options,
                    next.rollout_seeder, next.value_rng);
  next.env_steps += stats.env_steps;

  const std::vector<LabeledGoal> labeled =
      labeler(stats.table, next.policy, sampled.training_goals);

  const GanTrainStats gan_stats =
      train_gan(next.gan, labeled, next.gan_config, next.gan_train_rng);

  update_replay(next.replay, sampled.gan_goals);
  next.iteration += 1;

  rec.iteration = next.iteration;
  rec.env_steps = next.env_steps;
  rec.n_labeled = labeled.size();
  // The logged GOID fraction is the Eq.-4 share regardless of which labeler
  // feeds the GAN (fit-all trains on everything but still reports the truth).
  const std::vector<LabeledGoal> goid = label_goals(stats.table, next.thresholds);
  std::size_t positives = 0;
  for (const auto& lg : goid) positives += lg.label;
  rec.goid_fraction = goid.empty() ? 0.0 : double(positives) / double(goid.size());
  rec.buffer_size = next.replay.size();
  rec.disc_loss = gan_stats.final_disc_loss;
  rec.gen_loss = gan_stats.final_gen_loss;
  rec.gan_skipped = gan_stats.skipped;
  rec.mean_success = stats.mean_success;
  double kl = 0.0, improvement = 0.0;
  std::size_t accepted = 0;
  for (const auto& step : stats.trpo_steps) {
    if (step.accepted) {
      kl += step.mean_kl;
      improvement += step.surrogate_after - step.surrogate_before;
      ++accepted;
    }
  }
  rec.mean_kl = accepted ? kl / double(accepted) : 0.0;
  rec.surrogate_improvement = accepted ? improvement / double(accepted) : 0.0;
  rec.trpo_steps = stats.trpo_steps;

  state = std::move(next);
  return rec;
}

}  // namespace goalgen
