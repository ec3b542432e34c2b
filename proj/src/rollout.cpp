#include "goalgen/rollout.hpp"

#include <stdexcept>
#include <thread>

namespace goalgen {

DiagGaussian GaussianMlpPolicy::head(const Vec& obs) const {
  return DiagGaussian{mlp_forward(net, obs), log_std};
}

Vec GaussianMlpPolicy::act(const Vec& obs, Rng& rng, double* log_prob) const {
  const DiagGaussian h = head(obs);
  Vec a = gaussian_sample(h, rng);
  if (log_prob) *log_prob = gaussian_log_prob(h, a);
  return a;
}

Vec GaussianMlpPolicy::flat_params() const {
  Vec flat;
  flatten(net, flat);
  flat.insert(flat.end(), log_std.begin(), log_std.end());
  return flat;
}

void GaussianMlpPolicy::set_flat_params(const Vec& flat) {
  if (flat.size() != param_count()) {
    throw std::invalid_argument("set_flat_params: size mismatch");
  }
  Vec net_part(flat.begin(), flat.end() - std::ptrdiff_t(log_std.size()));
  unflatten(net_part, net);
  std::copy(flat.end() - std::ptrdiff_t(log_std.size()), flat.end(),
            log_std.begin());
}

GaussianMlpPolicy make_policy(const EnvConfig& config,
                              const std::vector<std::size_t>& hidden,
                              std::uint64_t seed, double init_log_std) {
  GaussianMlpPolicy p;
  const std::size_t obs = config.obs_dim() + config.goal_space.dim;
  p.net = make_mlp(obs, hidden, config.n, Act::tanh, seed, 0.01);
  p.log_std.assign(config.n, init_log_std);
  return p;
}

Vec make_observation(const EnvState& state, const Vec& goal) {
  Vec obs;
  obs.reserve(state.position.size() + state.velocity.size() + goal.size());
  obs.insert(obs.end(), state.position.begin(), state.position.end());
  obs.insert(obs.end(), state.velocity.begin(), state.velocity.end());
  obs.insert(obs.end(), goal.begin(), goal.end());
  return obs;
}

Trajectory run_episode(const Agent& policy, const Mlp* value_net,
                       const Vec& goal, const EnvConfig& config,
                       const RolloutOptions& options, Rng& rng) {
  Trajectory traj;
  traj.goal = goal;
  EnvState state = options.require_feasible_goals ? reset(config, goal)
                                                  : reset_unchecked(config, goal);
  for (int t = 0; t < config.horizon; ++t) {
    TimeStep ts;
    ts.obs = make_observation(state, goal);
    ts.action = policy.act(ts.obs, rng, &ts.log_prob);
    if (value_net) ts.value = mlp_forward(*value_net, ts.obs)[0];
    StepOut out = step(state, ts.action, goal, config);
    const bool reached = out.reward == 1.0;
    if (reached) traj.success = true;
    ts.reward = options.reward == RewardMode::indicator
                    ? out.reward
                    : -euclidean(out.state.position, goal);
    traj.steps.push_back(std::move(ts));
    state = out.state;
    if (options.terminate_on_success && reached) break;
  }
  traj.final_position = state.position;
  return traj;
}

std::vector<Trajectory> collect_rollouts(const Agent& policy,
                                         const Mlp* value_net,
                                         const std::vector<Vec>& goals,
                                         int episodes, const EnvConfig& config,
                                         const RolloutOptions& options,
                                         EpisodeSeeder& seeder, int workers) {
  if (goals.empty()) {
    throw std::invalid_argument("collect_rollouts: empty goal list");
  }
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(episodes));
  for (auto& s : seeds) s = seeder.next_seed();

  std::vector<Trajectory> out(static_cast<std::size_t>(episodes));
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      Rng rng(seeds[e]);
      std::uniform_int_distribution<std::size_t> pick(0, goals.size() - 1);
      const Vec& goal = goals[pick(rng)];
      out[e] = run_episode(policy, value_net, goal, config, options, rng);
    }
  };
  if (workers <= 1 || episodes < 2) {
    run_range(0, out.size());
  } else {
    const std::size_t nw = std::min<std::size_t>(std::size_t(workers), out.size());
    std::vector<std::thread> pool;
    const std::size_t chunk = (out.size() + nw - 1) / nw;
    for (std::size_t w = 0; w < nw; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(out.size(), b + chunk);
      if (b < e) pool.emplace_back(run_range, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

SuccessTable estimate_success_fractions(const std::vector<Trajectory>& trajectories) {
  SuccessTable table;
  merge_success_fractions(table, trajectories);
  return table;
}

void merge_success_fractions(SuccessTable& into,
                             const std::vector<Trajectory>& trajectories) {
  for (const auto& traj : trajectories) {
    auto& stats = into[traj.goal];
    stats.attempts += 1;
    stats.successes += traj.success ? 1 : 0;
  }
}

}  // namespace goalgen
