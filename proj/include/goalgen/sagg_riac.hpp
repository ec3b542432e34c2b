#pragma once

#include <deque>
#include <vector>

#include "goalgen/rollout.hpp"
#include "goalgen/trpo.hpp"

namespace goalgen {

struct SaggRiacConfig {
  int window = 100;             // zeta: per-region history capacity
  double eps_max = 0.1;         // reached-close-enough tolerance
  double eps_competence = 0.1;
  int t_max = 400;              // rollout horizon
  int n_new = 300;              // self-generated goals per iteration
  int g_max = 100;              // split trigger
  double p1 = 0.7;              // interest-weighted region sampling
  double p2 = 0.2;              // uniform over goal bounds
  double p3 = 0.1;              // perturbation of a past goal
  double mode3_variance = 0.1;

  void validate() const;
};

// Axis-aligned leaf of the goal-space partition with its recent
// (goal, competence) history. Intervals are half-open except at the global
// upper face, so every point lands in exactly one region.
struct SaggRegion {
  Vec lo, hi;
  std::deque<std::pair<Vec, double>> window;
  long inserted = 0;

  // Absolute difference of mean competence between the older and newer
  // halves of the window.
  double interest() const;
  double widest_extent() const;
};

struct SaggState {
  std::vector<SaggRegion> regions;
  Vec bounds_lo, bounds_hi;
  std::vector<Vec> attempted;  // history feeding mode-3 perturbations
};

SaggState make_sagg_state(const GoalSpace& space);

std::size_t find_region(const SaggState& state, const Vec& goal);

// 0 when within eps_max of the goal, otherwise -min(1, d / diameter).
double sagg_competence(const Vec& attempted_goal, const Vec& final_descriptor,
                       const SaggRiacConfig& config, const GoalSpace& space);

// Appends the sample to its region's window; a region that has absorbed more
// than g_max samples splits along the dimension/threshold maximizing the
// difference of the children's interest (quartile candidates per dimension,
// median-on-widest-dimension tie-break).
void update_regions(SaggState& state, const Vec& goal, double competence,
                    const SaggRiacConfig& config);

struct SaggGoal {
  Vec goal;
  int mode = 0;  // 1, 2 or 3
};

std::vector<SaggGoal> sagg_self_generate(const SaggState& state,
                                         const GoalSpace& space, int count,
                                         const SaggRiacConfig& config, Rng& rng);

struct SaggIterationStats {
  std::uint64_t env_steps = 0;
  int episodes = 0;
  double mean_success = 0.0;
  std::size_t region_count = 0;
  TrpoResult trpo;
};

// One batch adaptation of the SAGG-RIAC loop: self-generate goals, collect
// rollouts up to the step budget (updating regions with both the reached
// descriptor at competence 0 and the attempted goal at its measured
// competence), then one TRPO update plus a value fit.
SaggIterationStats sagg_riac_iteration(SaggState& state,
                                       GaussianMlpPolicy& policy, Mlp& value_net,
                                       Adam& value_adam,
                                       const SaggRiacConfig& config,
                                       const EnvConfig& env, const RlConfig& rl,
                                       std::uint64_t step_budget,
                                       EpisodeSeeder& seeder, Rng& goal_rng,
                                       Rng& value_rng);

}  // namespace goalgen
