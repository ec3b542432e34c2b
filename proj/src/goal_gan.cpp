#include "goalgen/goal_gan.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "goalgen/kernels.hpp"

namespace goalgen {

void GoidThresholds::validate() const {
  if (!(0.0 < r_min && r_min < r_max && r_max < 1.0)) {
    throw std::invalid_argument("thresholds must satisfy 0 < r_min < r_max < 1");
  }
}

GanPair make_gan(const GanConfig& config, std::size_t goal_dim,
                 std::uint64_t seed) {
  GanPair gan;
  gan.noise_dim = config.noise_dim;
  gan.output_noise_std = config.output_noise_std;
  gan.generator = make_mlp(config.noise_dim, config.generator_hidden, goal_dim,
                           Act::relu, derive_seed(seed, "generator"));
  gan.discriminator = make_mlp(goal_dim, config.discriminator_hidden, 1,
                               Act::relu, derive_seed(seed, "discriminator"));
  gan.gen_adam.lr = config.lr;
  gan.disc_adam.lr = config.lr;
  return gan;
}

std::vector<LabeledGoal> label_goals(const SuccessTable& table,
                                     const GoidThresholds& thresholds) {
  thresholds.validate();
  std::vector<LabeledGoal> out;
  out.reserve(table.size());
  for (const auto& [goal, stats] : table) {
    LabeledGoal lg;
    lg.goal = goal;
    lg.fraction = stats.fraction();
    lg.label = (thresholds.r_min <= lg.fraction && lg.fraction <= thresholds.r_max)
                   ? 1
                   : 0;
    out.push_back(std::move(lg));
  }
  return out;
}

std::vector<Vec> sample_generator_raw(const GanPair& gan, std::size_t count,
                                      Rng& rng) {
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(mlp_forward(gan.generator, normal_vec(rng, gan.noise_dim)));
  }
  return out;
}

std::vector<Vec> sample_goals(const GanPair& gan, const GoalSpace& space,
                              std::size_t count, Rng& rng) {
  if (count == 0) throw std::invalid_argument("sample_goals: count must be > 0");
  std::vector<Vec> out;
  out.reserve(count);
  std::normal_distribution<double> noise(0.0, gan.output_noise_std);
  for (std::size_t i = 0; i < count; ++i) {
    Vec g = mlp_forward(gan.generator, normal_vec(rng, gan.noise_dim));
    for (double& v : g) v += noise(rng);
    out.push_back(space.clip(g));
  }
  return out;
}

double discriminator_loss(const GanPair& gan,
                          const std::vector<LabeledGoal>& labeled,
                          const std::vector<Vec>& generated) {
  if (labeled.empty() && generated.empty()) {
    throw std::invalid_argument("discriminator_loss: no inputs");
  }
  double pos = 0.0, neg = 0.0, gen = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& lg : labeled) {
    const double d = mlp_forward(gan.discriminator, lg.goal)[0];
    if (lg.label == 1) {
      pos += (d - gan.b) * (d - gan.b);
      ++n_pos;
    } else {
      neg += (d - gan.a) * (d - gan.a);
      ++n_neg;
    }
  }
  for (const auto& g : generated) {
    const double d = mlp_forward(gan.discriminator, g)[0];
    gen += (d - gan.a) * (d - gan.a);
  }
  double loss = 0.0;
  if (n_pos) loss += pos / double(n_pos);
  if (n_neg) loss += neg / double(n_neg);
  if (!generated.empty()) loss += gen / double(generated.size());
  return loss;
}

double generator_loss(const GanPair& gan, const std::vector<Vec>& noise_batch) {
  if (noise_batch.empty()) {
    throw std::invalid_argument("generator_loss: empty noise batch");
  }
  double acc = 0.0;
  for (const auto& z : noise_batch) {
    const Vec g = mlp_forward(gan.generator, z);
    const double d = mlp_forward(gan.discriminator, g)[0];
    acc += (d - gan.c) * (d - gan.c);
  }
  return acc / double(noise_batch.size());
}

double discriminator_loss_grad(const GanPair& gan,
                               const std::vector<LabeledGoal>& labeled,
                               const std::vector<Vec>& generated,
                               MlpGrads& disc_grads) {
  if (labeled.empty() && generated.empty()) {
    throw std::invalid_argument("discriminator_loss_grad: no inputs");
  }
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& lg : labeled) (lg.label == 1 ? n_pos : n_neg)++;

  double pos = 0.0, neg = 0.0, gen = 0.0;
  FwdCache cache;
  Vec dout(1);
  for (const auto& lg : labeled) {
    mlp_forward_cached(gan.discriminator, lg.goal, cache);
    const double d = cache.output()[0];
    const double target = lg.label == 1 ? gan.b : gan.a;
    const double w = lg.label == 1 ? 1.0 / double(n_pos) : 1.0 / double(n_neg);
    (lg.label == 1 ? pos : neg) += w * (d - target) * (d - target);
    dout[0] = 2.0 * w * (d - target);
    mlp_backward(gan.discriminator, cache, dout, disc_grads);
  }
  for (const auto& g : generated) {
    mlp_forward_cached(gan.discriminator, g, cache);
    const double d = cache.output()[0];
    const double w = 1.0 / double(generated.size());
    gen += w * (d - gan.a) * (d - gan.a);
    dout[0] = 2.0 * w * (d - gan.a);
    mlp_backward(gan.discriminator, cache, dout, disc_grads);
  }
  return pos + neg + gen;
}

double generator_loss_grad(const GanPair& gan,
                           const std::vector<Vec>& noise_batch,
                           MlpGrads& gen_grads) {
  if (noise_batch.empty()) {
    throw std::invalid_argument("generator_loss_grad: empty noise batch");
  }
  double acc = 0.0;
  FwdCache gen_cache, disc_cache;
  Vec dout(1), dgoal;
  const double w = 1.0 / double(noise_batch.size());
  MlpGrads disc_scratch = zeros_like(gan.discriminator);
  for (const auto& z : noise_batch) {
    mlp_forward_cached(gan.generator, z, gen_cache);
    mlp_forward_cached(gan.discriminator, gen_cache.output(), disc_cache);
    const double d = disc_cache.output()[0];
    acc += w * (d - gan.c) * (d - gan.c);
    dout[0] = 2.0 * w * (d - gan.c);
    mlp_backward(gan.discriminator, disc_cache, dout, disc_scratch, &dgoal);
    mlp_backward(gan.generator, gen_cache, dgoal, gen_grads);
  }
  return acc;
}

namespace {

void adam_step_mlp(Mlp& net, Adam& adam, const MlpGrads& grads) {
  Vec params, grad_flat;
  flatten(net, params);
  flatten(grads, grad_flat);
  adam.step(params, grad_flat);
  unflatten(params, net);
}

// One discriminator + one generator minibatch step on the given labeled set.
void gan_step(GanPair& gan, const std::vector<LabeledGoal>& labeled,
              const GanConfig& config, Rng& rng, double* disc_loss,
              double* gen_loss) {
  std::uniform_int_distribution<std::size_t> pick(0, labeled.size() - 1);
  std::vector<LabeledGoal> batch;
  batch.reserve(std::size_t(config.minibatch));
  for (int i = 0; i < config.minibatch; ++i) batch.push_back(labeled[pick(rng)]);

  std::vector<Vec> generated;
  generated.reserve(std::size_t(config.minibatch));
  for (int i = 0; i < config.minibatch; ++i) {
    generated.push_back(mlp_forward(gan.generator, normal_vec(rng, gan.noise_dim)));
  }
  MlpGrads disc_grads = zeros_like(gan.discriminator);
  *disc_loss = discriminator_loss_grad(gan, batch, generated, disc_grads);
  adam_step_mlp(gan.discriminator, gan.disc_adam, disc_grads);

  std::vector<Vec> noise;
  noise.reserve(std::size_t(config.minibatch));
  for (int i = 0; i < config.minibatch; ++i) {
    noise.push_back(normal_vec(rng, gan.noise_dim));
  }
  MlpGrads gen_grads = zeros_like(gan.generator);
  *gen_loss = generator_loss_grad(gan, noise, gen_grads);
  adam_step_mlp(gan.generator, gan.gen_adam, gen_grads);
}

}  // namespace

GanTrainStats train_gan(GanPair& gan, const std::vector<LabeledGoal>& labeled,
                        const GanConfig& config, Rng& rng) {
  GanTrainStats stats;
  bool any_positive = false;
  for (const auto& lg : labeled) any_positive |= (lg.label == 1);
  if (labeled.empty() || !any_positive) {
    std::fprintf(stderr,
                 "[goal-gan] no positively labeled goals, skipping GAN update\n");
    stats.skipped = true;
    return stats;
  }
  for (int it = 0; it < config.iterations; ++it) {
    gan_step(gan, labeled, config, rng, &stats.final_disc_loss,
             &stats.final_gen_loss);
    ++stats.iterations;
  }
  return stats;
}

GanTrainStats initialize_gan(GanPair& gan, const Agent& policy,
                             const EnvConfig& env, const GanConfig& config,
                             EpisodeSeeder& seeder, Rng& rng) {
  // Visitation set of the untrained policy on uniform goals.
  std::vector<LabeledGoal> visited;
  RolloutOptions options;
  for (int ep = 0; ep < config.init_episodes; ++ep) {
    Rng ep_rng(seeder.next_seed());
    Vec goal(env.goal_space.dim);
    for (std::size_t i = 0; i < goal.size(); ++i) {
      goal[i] = uniform(ep_rng, env.goal_space.lo[i], env.goal_space.hi[i]);
    }
    const Trajectory traj =
        run_episode(policy, nullptr, goal, env, options, ep_rng);
    // The first n entries of each stored observation are the visited
    // position, i.e. the goal-space projection f(s).
    for (const auto& ts : traj.steps) {
      LabeledGoal lg;
      lg.goal.assign(ts.obs.begin(), ts.obs.begin() + std::ptrdiff_t(env.n));
      lg.fraction = 1.0;
      lg.label = 1;
      visited.push_back(std::move(lg));
    }
  }
  GanTrainStats stats;
  if (visited.empty()) {
    stats.skipped = true;
    return stats;
  }
  for (int it = 0; it < config.init_steps; ++it) {
    gan_step(gan, visited, config, rng, &stats.final_disc_loss,
             &stats.final_gen_loss);
    ++stats.iterations;
  }
  return stats;
}

}  // namespace goalgen
