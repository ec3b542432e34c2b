#pragma once

#include <string>
#include <vector>

#include "goalgen/rollout.hpp"

namespace goalgen {

struct RlConfig {
  double gamma = 0.998;
  double gae_lambda = 0.995;
  double kl_delta = 0.01;
  int inner_iterations = 5;
  int episodes_per_iteration = 100;
  int cg_iterations = 10;
  double cg_damping = 0.1;
  // Fisher-vector products run on every k-th timestep of the batch.
  int fvp_stride = 5;
  double backtrack_factor = 0.8;
  int max_backtracks = 10;
  int value_fit_passes = 3;
  double value_lr = 1e-3;
  int value_minibatch = 256;
  int rollout_workers = 1;

  void validate() const;
};

struct GaeResult {
  Vec advantages;     // raw GAE(gamma, lambda), one per step
  Vec value_targets;  // advantage + value estimate
};

// Standard GAE recursion over TD residuals with a zero bootstrap value at
// episode termination. Value estimates come from the trajectory (recorded at
// collection time).
GaeResult compute_gae(const Trajectory& trajectory, double gamma, double lambda);

struct TrpoResult {
  bool accepted = false;
  double mean_kl = 0.0;
  double surrogate_before = 0.0;
  double surrogate_after = 0.0;
  int backtracks = 0;
  std::string note;
};

// One trust-region step: importance-weighted surrogate maximized under
// mean KL(old || new) <= delta via conjugate gradient on the Fisher-vector
// product plus backtracking line search. Advantages are normalized batch-wise
// here. On failure the policy is left untouched.
TrpoResult trpo_update(GaussianMlpPolicy& policy,
                       const std::vector<Trajectory>& trajectories,
                       const std::vector<Vec>& advantages,
                       const RlConfig& config);

struct PolicyUpdateStats {
  std::vector<TrpoResult> trpo_steps;
  SuccessTable table;       // aggregated over every inner-iteration rollout
  std::uint64_t env_steps = 0;
  double mean_success = 0.0;
};

// The inner loop of one outer iteration: inner_iterations times
// {collect episodes -> GAE -> TRPO step -> value fit}.
PolicyUpdateStats update_policy(GaussianMlpPolicy& policy, Mlp& value_net,
                                Adam& value_adam, const std::vector<Vec>& goals,
                                const EnvConfig& env, const RlConfig& config,
                                const RolloutOptions& options,
                                EpisodeSeeder& seeder, Rng& value_rng);

// Regression of the value net onto targets: `passes` shuffled minibatch
// sweeps with Adam.
void fit_value_net(Mlp& value_net, Adam& adam, const std::vector<Vec>& inputs,
                   const Vec& targets, int passes, int minibatch, Rng& rng);

namespace detail {
// Exposed for the gradient/Fisher test harness.
Vec surrogate_gradient(const GaussianMlpPolicy& policy,
                       const std::vector<const TimeStep*>& steps,
                       const Vec& advantages);
double surrogate_value(const GaussianMlpPolicy& policy,
                       const std::vector<const TimeStep*>& steps,
                       const Vec& advantages);
Vec fisher_vector_product(const GaussianMlpPolicy& policy,
                          const std::vector<const TimeStep*>& steps,
                          const Vec& vec, int stride, double damping);
Vec kl_gradient(const GaussianMlpPolicy& old_policy,
                const GaussianMlpPolicy& new_policy,
                const std::vector<const TimeStep*>& steps);
double mean_kl(const GaussianMlpPolicy& old_policy,
               const GaussianMlpPolicy& new_policy,
               const std::vector<const TimeStep*>& steps);
}  // namespace detail

}  // namespace goalgen
