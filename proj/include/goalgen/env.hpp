#pragma once

#include <string>
#include <vector>

#include "goalgen/tensor.hpp"

namespace goalgen {

enum class EnvKind { multipath_maze, ndim_point_mass };

std::string env_kind_name(EnvKind k);
EnvKind env_kind_from_name(const std::string& name);

// Axis-aligned box.
struct Aabb {
  Vec lo, hi;
  bool contains(const Vec& p) const;
  bool strictly_inside(const Vec& p) const;
};

struct MazeGeometry {
  Aabb outer;
  std::vector<Aabb> walls;
};

// Goal set: the axis-aligned sampling box, the success tolerance, and the
// Euclidean metric on goal descriptors (the projection f takes a state to
// its position vector).
struct GoalSpace {
  std::size_t dim = 0;
  Vec lo, hi;
  double tolerance = 0.0;

  Vec clip(const Vec& g) const;
  double diameter() const;
};

struct EnvConfig {
  EnvKind kind = EnvKind::multipath_maze;
  std::size_t n = 2;        // goal/action dimension
  int horizon = 400;        // steps per episode
  double dt = 0.02;         // seconds
  double action_limit = 1.0;  // per-dimension |v| (maze) or |a| (n-dim)
  GoalSpace goal_space;
  MazeGeometry maze;        // maze kind only
  Vec feas_lo, feas_hi;     // feasible box for the n-dim kind

  std::size_t obs_dim() const { return 2 * n; }  // position + velocity
};

// The multi-path maze: outer box [-5,5]^2, start at the center, four 2 m-wide
// corridors toward +x/-x/+y/-y joining a 2 m-wide perimeter ring; the four
// 2x2 blocks at (+-2,+-2) are walls. Velocity-command actions clipped to
// 1 m/s per dimension, tolerance 0.3 m, 400 steps at dt=0.02.
EnvConfig make_maze_config();

// N-dimensional point mass on the strip [-5,5]x[-1,1]x[-0.3,0.3]^(N-2)
// embedded in the box [-5,5]^N. Acceleration actions clipped to 5 m/s^2 per
// dimension, tolerance 0.3*sqrt(N)/sqrt(2).
EnvConfig make_ndim_config(std::size_t n);

// Tolerance grows with dimension to offset average L2 distance growth.
double goal_tolerance_for_dim(std::size_t n);

bool is_feasible(const Vec& goal, const EnvConfig& config);

struct EnvState {
  Vec position;
  Vec velocity;
  int t = 0;
};

// Strict reset: rejects infeasible goals. Training on generator-proposed
// goals (which may be infeasible but inside the bounds box) goes through
// reset_unchecked instead.
EnvState reset(const EnvConfig& config, const Vec& goal);
EnvState reset_unchecked(const EnvConfig& config, const Vec& goal);

struct StepOut {
  EnvState state;
  double reward = 0.0;
  bool done = false;
};

StepOut step(const EnvState& state, const Vec& action, const Vec& goal,
             const EnvConfig& config);

// 1 iff d(f(next_state), goal) <= tolerance (inclusive).
double indicator_reward(const EnvState& next_state, const Vec& goal,
                        const GoalSpace& space);

// Cell centers of an axis-aligned grid over the per-dimension feasible
// intervals, filtered by is_feasible, in row-major order. Empty when the
// resolution exceeds any dimension's feasible extent.
std::vector<Vec> feasible_goal_grid(const EnvConfig& config, double resolution,
                                    int max_points_per_dim = 0);

// Feasible intervals per dimension: the outer box (maze) or the strip box
// (n-dim point mass).
void feasible_extent(const EnvConfig& config, Vec& lo, Vec& hi);

// Analytic feasible-volume fraction of the goal bounds box.
double feasible_volume_fraction(const EnvConfig& config);

}  // namespace goalgen
