#pragma once

#include <cstdint>
#include <vector>

#include "goalgen/mlp.hpp"
#include "goalgen/rng.hpp"
#include "goalgen/rollout.hpp"
#include "goalgen/tensor.hpp"

namespace goalgen {

struct GoidThresholds {
  double r_min = 0.1;
  double r_max = 0.9;
  void validate() const;
};

// A goal with its empirical success fraction and the intermediate-difficulty
// label y = 1{r_min <= fraction <= r_max} (bounds inclusive).
struct LabeledGoal {
  Vec goal;
  double fraction = 0.0;
  int label = 0;
};

struct GanConfig {
  std::size_t noise_dim = 4;
  std::vector<std::size_t> generator_hidden{128, 128};
  std::vector<std::size_t> discriminator_hidden{256, 256};
  int iterations = 200;
  int minibatch = 64;
  double lr = 1e-3;
  double output_noise_std = 1.0;
  int init_steps = 1000;    // generator/discriminator step pairs
  int init_episodes = 100;  // rollouts for the visitation set
};

// Least-squares GAN over goal space with target values a (negative/fake),
// b (positive) and c (generator target).
struct GanPair {
  Mlp generator;      // noise_dim -> goal_dim
  Mlp discriminator;  // goal_dim -> 1
  std::size_t noise_dim = 4;
  double a = -1.0;
  double b = 1.0;
  double c = 0.0;
  double output_noise_std = 1.0;
  Adam gen_adam;
  Adam disc_adam;

  std::size_t goal_dim() const { return generator.out_dim(); }
};

GanPair make_gan(const GanConfig& config, std::size_t goal_dim,
                 std::uint64_t seed);

// One LabeledGoal per table entry, in table (lexicographic) order.
std::vector<LabeledGoal> label_goals(const SuccessTable& table,
                                     const GoidThresholds& thresholds);

// Raw generator outputs G(z), z ~ N(0, I).
std::vector<Vec> sample_generator_raw(const GanPair& gan, std::size_t count,
                                      Rng& rng);

// Training goals: G(z) plus unit-variance noise per dimension, clipped to the
// goal-space bounds.
std::vector<Vec> sample_goals(const GanPair& gan, const GoalSpace& space,
                              std::size_t count, Rng& rng);

// Three separately normalized terms: positives toward b, negatives toward a,
// generated samples toward a. With every label 1 this is exactly the
// two-term LSGAN discriminator loss.
double discriminator_loss(const GanPair& gan,
                          const std::vector<LabeledGoal>& labeled,
                          const std::vector<Vec>& generated);

// mean_z (D(G(z)) - c)^2.
double generator_loss(const GanPair& gan, const std::vector<Vec>& noise_batch);

// Loss gradients (exposed for the gradient-check harness).
double discriminator_loss_grad(const GanPair& gan,
                               const std::vector<LabeledGoal>& labeled,
                               const std::vector<Vec>& generated,
                               MlpGrads& disc_grads);
double generator_loss_grad(const GanPair& gan,
                           const std::vector<Vec>& noise_batch,
                           MlpGrads& gen_grads);

struct GanTrainStats {
  int iterations = 0;
  double final_disc_loss = 0.0;
  double final_gen_loss = 0.0;
  bool skipped = false;
};

// Alternating training: per iteration one discriminator minibatch step and
// one generator step, fresh noise each step. Skips (with a warning) when no
// goal carries a positive label, so the generator never collapses onto pure
// negatives.
GanTrainStats train_gan(GanPair& gan, const std::vector<LabeledGoal>& labeled,
                        const GanConfig& config, Rng& rng);

// Bootstraps the generator onto the initial policy's state-visitation
// distribution: rollouts on uniform goals, visited positions become an
// all-positive training set for a fixed number of step pairs.
GanTrainStats initialize_gan(GanPair& gan, const Agent& policy,
                             const EnvConfig& env, const GanConfig& config,
                             EpisodeSeeder& seeder, Rng& rng);

}  // namespace goalgen
