#include "goalgen/sagg_riac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace goalgen {

void SaggRiacConfig::validate() const {
  if (std::abs(p1 + p2 + p3 - 1.0) > 1e-12) {
    throw std::invalid_argument("sagg mode probabilities must sum to 1");
  }
  if (window <= 0 || g_max <= 0 || n_new <= 0 || t_max <= 0) {
    throw std::invalid_argument("sagg counts must be positive");
  }
}

namespace {

double mean_competence(const std::deque<std::pair<Vec, double>>& w,
                       std::size_t begin, std::size_t end) {
  if (begin >= end) return 0.0;
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += w[i].second;
  return acc / double(end - begin);
}

double interest_of(const std::deque<std::pair<Vec, double>>& w) {
  const std::size_t n = w.size();
  if (n < 2) return 0.0;
  const std::size_t half = n / 2;
  return std::abs(mean_competence(w, 0, half) - mean_competence(w, half, n));
}

}  // namespace

double SaggRegion::interest() const { return interest_of(window); }

double SaggRegion::widest_extent() const {
  double best = 0.0;
  for (std::size_t d = 0; d < lo.size(); ++d) best = std::max(best, hi[d] - lo[d]);
  return best;
}

SaggState make_sagg_state(const GoalSpace& space) {
  SaggState state;
  state.bounds_lo = space.lo;
  state.bounds_hi = space.hi;
  SaggRegion root;
  root.lo = space.lo;
  root.hi = space.hi;
  state.regions.push_back(std::move(root));
  return state;
}

namespace {

bool region_contains(const SaggState& state, const SaggRegion& r, const Vec& p) {
  for (std::size_t d = 0; d < p.size(); ++d) {
    if (p[d] < r.lo[d]) return false;
    if (p[d] > r.hi[d]) return false;
    if (p[d] == r.hi[d] && r.hi[d] != state.bounds_hi[d]) return false;
  }
  return true;
}

}  // namespace

std::size_t find_region(const SaggState& state, const Vec& goal) {
  for (std::size_t i = 0; i < state.regions.size(); ++i) {
    if (region_contains(state, state.regions[i], goal)) return i;
  }
  throw std::runtime_error("find_region: goal outside the goal bounds");
}

double sagg_competence(const Vec& attempted_goal, const Vec& final_descriptor,
                       const SaggRiacConfig& config, const GoalSpace& space) {
  const double d = euclidean(attempted_goal, final_descriptor);
  if (d <= config.eps_max) return 0.0;
  return -std::min(1.0, d / space.diameter());
}

namespace {

struct SplitChoice {
  std::size_t dim = 0;
  double threshold = 0.0;
  double score = -1.0;
};

double quantile_sorted(std::vector<double>& values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * double(values.size() - 1);
  const auto lo = std::size_t(std::floor(pos));
  const auto hi = std::min(values.size() - 1, lo + 1);
  const double frac = pos - double(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

void split_region(SaggState& state, std::size_t index) {
  SaggRegion region = std::move(state.regions[index]);
  SplitChoice best;
  const std::size_t dims = region.lo.size();
  for (std::size_t d = 0; d < dims; ++d) {
    if (region.hi[d] - region.lo[d] <= 1e-9) continue;
    std::vector<double> coords;
    coords.reserve(region.window.size());
    for (const auto& [g, c] : region.window) coords.push_back(g[d]);
    for (double q : {0.25, 0.5, 0.75}) {
      std::vector<double> tmp = coords;
      const double thr = quantile_sorted(tmp, q);
      if (thr <= region.lo[d] || thr >= region.hi[d]) continue;
      std::deque<std::pair<Vec, double>> left, right;
      for (const auto& e : region.window) {
        (e.first[d] < thr ? left : right).push_back(e);
      }
      if (left.empty() || right.empty()) continue;
      const double score = std::abs(interest_of(left) - interest_of(right));
      if (score > best.score) best = {d, thr, score};
    }
  }
  if (best.score <= 0.0) {
    // Constant competence (or no valid quartile): median split on the widest
    // dimension, box midpoint when the median degenerates.
    std::size_t d = 0;
    double extent = -1.0;
    for (std::size_t k = 0; k < dims; ++k) {
      if (region.hi[k] - region.lo[k] > extent) {
        extent = region.hi[k] - region.lo[k];
        d = k;
      }
    }
    std::vector<double> coords;
    for (const auto& [g, c] : region.window) coords.push_back(g[d]);
    double thr = coords.empty() ? 0.5 * (region.lo[d] + region.hi[d])
                                : quantile_sorted(coords, 0.5);
    if (thr <= region.lo[d] || thr >= region.hi[d]) {
      thr = 0.5 * (region.lo[d] + region.hi[d]);
    }
    best = {d, thr, 0.0};
  }

  SaggRegion left, right;
  left.lo = region.lo;
  left.hi = region.hi;
  left.hi[best.dim] = best.threshold;
  right.lo = region.lo;
  right.lo[best.dim] = best.threshold;
  right.hi = region.hi;
  for (const auto& e : region.window) {
    (e.first[best.dim] < best.threshold ? left : right).window.push_back(e);
  }
  left.inserted = long(left.window.size());
  right.inserted = long(right.window.size());
  state.regions[index] = std::move(left);
  state.regions.push_back(std::move(right));
}

}  // namespace

void update_regions(SaggState& state, const Vec& goal, double competence,
                    const SaggRiacConfig& config) {
  const std::size_t idx = find_region(state, goal);
  SaggRegion& region = state.regions[idx];
  region.window.emplace_back(goal, competence);
  if (region.window.size() > std::size_t(config.window)) {
    region.window.pop_front();
  }
  region.inserted += 1;
  if (region.inserted > config.g_max) split_region(state, idx);
}

std::vector<SaggGoal> sagg_self_generate(const SaggState& state,
                                         const GoalSpace& space, int count,
                                         const SaggRiacConfig& config, Rng& rng) {
  config.validate();
  std::vector<SaggGoal> out;
  out.reserve(std::size_t(count));
  std::normal_distribution<double> noise(0.0, std::sqrt(config.mode3_variance));
  for (int i = 0; i < count; ++i) {
    SaggGoal sg;
    const double u = uniform(rng, 0.0, 1.0);
    if (u < config.p1) {
      sg.mode = 1;
      double total = 0.0;
      for (const auto& r : state.regions) total += r.interest();
      std::size_t pick = 0;
      if (total > 0.0) {
        double mark = uniform(rng, 0.0, total);
        for (std::size_t r = 0; r < state.regions.size(); ++r) {
          mark -= state.regions[r].interest();
          if (mark <= 0.0) {
            pick = r;
            break;
          }
        }
      } else {
        pick = std::uniform_int_distribution<std::size_t>(
            0, state.regions.size() - 1)(rng);
      }
      const SaggRegion& r = state.regions[pick];
      sg.goal.resize(space.dim);
      for (std::size_t d = 0; d < space.dim; ++d) {
        sg.goal[d] = uniform(rng, r.lo[d], r.hi[d]);
      }
    } else if (u < config.p1 + config.p2 || state.attempted.empty()) {
      sg.mode = u < config.p1 + config.p2 ? 2 : 3;
      sg.goal.resize(space.dim);
      for (std::size_t d = 0; d < space.dim; ++d) {
        sg.goal[d] = uniform(rng, space.lo[d], space.hi[d]);
      }
    } else {
      sg.mode = 3;
      const Vec& base = state.attempted[std::uniform_int_distribution<std::size_t>(
          0, state.attempted.size() - 1)(rng)];
      sg.goal.resize(space.dim);
      for (std::size_t d = 0; d < space.dim; ++d) {
        sg.goal[d] = base[d] + noise(rng);
      }
      sg.goal = space.clip(sg.goal);
    }
    out.push_back(std::move(sg));
  }
  return out;
}

SaggIterationStats sagg_riac_iteration(SaggState& state,
                                       GaussianMlpPolicy& policy, Mlp& value_net,
                                       Adam& value_adam,
                                       const SaggRiacConfig& config,
                                       const EnvConfig& env, const RlConfig& rl,
                                       std::uint64_t step_budget,
                                       EpisodeSeeder& seeder, Rng& goal_rng,
                                       Rng& value_rng) {
  config.validate();
  SaggIterationStats stats;
  const std::vector<SaggGoal> goals =
      sagg_self_generate(state, env.goal_space, config.n_new, config, goal_rng);

  EnvConfig episode_env = env;
  episode_env.horizon = config.t_max;
  RolloutOptions options;
  std::vector<Trajectory> paths;
  std::uint64_t steps = 0;
  int successes = 0;
  while (steps < step_budget) {
    const SaggGoal& sg = goals[std::uniform_int_distribution<std::size_t>(
        0, goals.size() - 1)(goal_rng)];
    Rng ep_rng(seeder.next_seed());
    Trajectory traj =
        run_episode(policy, &value_net, sg.goal, episode_env, options, ep_rng);
    steps += traj.steps.size();
    successes += traj.success ? 1 : 0;
    const double competence =
        sagg_competence(sg.goal, traj.final_position, config, env.goal_space);
    update_regions(state, traj.final_position, 0.0, config);
    update_regions(state, sg.goal, competence, config);
    state.attempted.push_back(sg.goal);
    paths.push_back(std::move(traj));
  }

  std::vector<Vec> advs;
  std::vector<Vec> obs;
  Vec targets;
  for (const auto& t : paths) {
    GaeResult g = compute_gae(t, rl.gamma, rl.gae_lambda);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      obs.push_back(t.steps[i].obs);
      targets.push_back(g.value_targets[i]);
    }
    advs.push_back(std::move(g.advantages));
  }
  stats.trpo = trpo_update(policy, paths, advs, rl);
  fit_value_net(value_net, value_adam, obs, targets, rl.value_fit_passes,
                rl.value_minibatch, value_rng);

  stats.env_steps = steps;
  stats.episodes = int(paths.size());
  stats.mean_success = paths.empty() ? 0.0 : double(successes) / double(paths.size());
  stats.region_count = state.regions.size();
  return stats;
}

}  // namespace goalgen
