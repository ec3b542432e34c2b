#include "goalgen/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace goalgen {

std::string env_kind_name(EnvKind k) {
  return k == EnvKind::multipath_maze ? "multipath-maze" : "ndim-point-mass";
}

EnvKind env_kind_from_name(const std::string& name) {
  if (name == "multipath-maze" || name == "maze") return EnvKind::multipath_maze;
  if (name == "ndim-point-mass" || name == "ndim") return EnvKind::ndim_point_mass;
  throw std::invalid_argument("unknown environment kind: " + name);
}

bool Aabb::contains(const Vec& p) const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  }
  return true;
}

bool Aabb::strictly_inside(const Vec& p) const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (p[i] <= lo[i] || p[i] >= hi[i]) return false;
  }
  return true;
}

Vec GoalSpace::clip(const Vec& g) const {
  Vec out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[i] = std::clamp(g[i], lo[i], hi[i]);
  }
  return out;
}

double GoalSpace::diameter() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = hi[i] - lo[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double goal_tolerance_for_dim(std::size_t n) {
  return 0.3 * std::sqrt(double(n)) / std::sqrt(2.0);
}

EnvConfig make_maze_config() {
  EnvConfig c;
  c.kind = EnvKind::multipath_maze;
  c.n = 2;
  c.horizon = 400;
  c.dt = 0.02;
  c.action_limit = 1.0;
  c.goal_space.dim = 2;
  c.goal_space.lo = {-5.0, -5.0};
  c.goal_space.hi = {5.0, 5.0};
  c.goal_space.tolerance = 0.3;
  c.maze.outer = {{-5.0, -5.0}, {5.0, 5.0}};
  c.maze.walls = {
      {{1.0, 1.0}, {3.0, 3.0}},
      {{-3.0, 1.0}, {-1.0, 3.0}},
      {{-3.0, -3.0}, {-1.0, -1.0}},
      {{1.0, -3.0}, {3.0, -1.0}},
  };
  c.feas_lo = c.maze.outer.lo;
  c.feas_hi = c.maze.outer.hi;
  return c;
}

EnvConfig make_ndim_config(std::size_t n) {
  if (n < 2) throw std::invalid_argument("ndim point mass needs n >= 2");
  EnvConfig c;
  c.kind = EnvKind::ndim_point_mass;
  c.n = n;
  c.horizon = 400;
  c.dt = 0.02;
  c.action_limit = 5.0;
  c.goal_space.dim = n;
  c.goal_space.lo.assign(n, -5.0);
  c.goal_space.hi.assign(n, 5.0);
  c.goal_space.tolerance = goal_tolerance_for_dim(n);
  c.feas_lo.assign(n, -0.3);
  c.feas_hi.assign(n, 0.3);
  c.feas_lo[0] = -5.0;
  c.feas_hi[0] = 5.0;
  if (n >= 2) {
    c.feas_lo[1] = -1.0;
    c.feas_hi[1] = 1.0;
  }
  return c;
}

bool is_feasible(const Vec& goal, const EnvConfig& config) {
  if (goal.size() != config.goal_space.dim) {
    throw std::invalid_argument("is_feasible: goal has wrong dimension");
  }
  if (config.kind == EnvKind::ndim_point_mass) {
    for (std::size_t i = 0; i < goal.size(); ++i) {
      if (goal[i] < config.feas_lo[i] || goal[i] > config.feas_hi[i]) return false;
    }
    return true;
  }
  if (!config.maze.outer.contains(goal)) return false;
  for (const auto& w : config.maze.walls) {
    if (w.strictly_inside(goal)) return false;
  }
  return true;
}

EnvState reset_unchecked(const EnvConfig& config, const Vec& goal) {
  if (goal.size() != config.goal_space.dim) {
    throw std::invalid_argument("reset: goal has wrong dimension");
  }
  EnvState s;
  s.position.assign(config.n, 0.0);
  s.velocity.assign(config.n, 0.0);
  s.t = 0;
  return s;
}

EnvState reset(const EnvConfig& config, const Vec& goal) {
  if (!is_feasible(goal, config)) {
    throw std::invalid_argument("reset: goal is outside the feasible region");
  }
  return reset_unchecked(config, goal);
}

namespace {

// Moves coordinate `axis` from its current value toward `target`, clamping at
// the feasible-box faces and at any maze wall face crossed while the other
// coordinates sit strictly inside that wall's span. Returns the final
// coordinate and whether a clamp happened.
std::pair<double, bool> move_axis(const EnvConfig& config, const Vec& pos,
                                  std::size_t axis, double target) {
  double x0 = pos[axis];
  double x = std::clamp(target, config.feas_lo[axis], config.feas_hi[axis]);
  bool hit = (x != target);
  if (config.kind == EnvKind::multipath_maze) {
    for (const auto& w : config.maze.walls) {
      bool in_span = true;
      for (std::size_t b = 0; b < pos.size(); ++b) {
        if (b == axis) continue;
        if (pos[b] <= w.lo[b] || pos[b] >= w.hi[b]) {
          in_span = false;
          break;
        }
      }
      if (!in_span) continue;
      if (x0 <= w.lo[axis] && x > w.lo[axis]) {
        x = w.lo[axis];
        hit = true;
      } else if (x0 >= w.hi[axis] && x < w.hi[axis]) {
        x = w.hi[axis];
        hit = true;
      }
    }
  }
  return {x, hit};
}

}  // namespace

double indicator_reward(const EnvState& next_state, const Vec& goal,
                        const GoalSpace& space) {
  const double d = euclidean(next_state.position, goal);
  return d <= space.tolerance ? 1.0 : 0.0;
}

StepOut step(const EnvState& state, const Vec& action, const Vec& goal,
             const EnvConfig& config) {
  if (action.size() != config.n) {
    throw std::invalid_argument("step: action has wrong dimension");
  }
  if (!all_finite(action)) {
    throw std::invalid_argument("step: action has non-finite components");
  }
  Vec clipped(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    clipped[i] = std::clamp(action[i], -config.action_limit, config.action_limit);
  }

  StepOut out;
  out.state = state;
  EnvState& next = out.state;
  if (config.kind == EnvKind::multipath_maze) {
    // Velocity command: position integrates the clipped command; a blocked
    // axis zeroes the executed velocity component.
    next.velocity = clipped;
    for (std::size_t axis = 0; axis < config.n; ++axis) {
      const double target = next.position[axis] + clipped[axis] * config.dt;
      auto [x, hit] = move_axis(config, next.position, axis, target);
      next.position[axis] = x;
      if (hit) next.velocity[axis] = 0.0;
    }
  } else {
    // Double integrator: position advances with the old velocity, then the
    // clipped acceleration updates the velocity.
    for (std::size_t axis = 0; axis < config.n; ++axis) {
      const double target = next.position[axis] + state.velocity[axis] * config.dt;
      auto [x, hit] = move_axis(config, next.position, axis, target);
      next.position[axis] = x;
      next.velocity[axis] = state.velocity[axis] + clipped[axis] * config.dt;
      if (hit) next.velocity[axis] = 0.0;
    }
  }
  next.t = state.t + 1;
  out.reward = indicator_reward(next, goal, config.goal_space);
  out.done = (out.reward == 1.0) || (next.t >= config.horizon);
  return out;
}

void feasible_extent(const EnvConfig& config, Vec& lo, Vec& hi) {
  lo = config.feas_lo;
  hi = config.feas_hi;
}

std::vector<Vec> feasible_goal_grid(const EnvConfig& config, double resolution,
                                    int max_points_per_dim) {
  if (resolution <= 0.0) {
    throw std::invalid_argument("feasible_goal_grid: resolution must be > 0");
  }
  Vec lo, hi;
  feasible_extent(config, lo, hi);
  const std::size_t dim = config.goal_space.dim;
  std::vector<std::size_t> counts(dim);
  Vec cell(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double extent = hi[i] - lo[i];
    const auto raw = std::size_t(std::floor(extent / resolution + 1e-9));
    auto m = raw;
    if (max_points_per_dim > 0) m = std::min(m, std::size_t(max_points_per_dim));
    if (m == 0) return {};
    counts[i] = m;
    // Capped dimensions stretch the spacing to keep covering the extent.
    cell[i] = (m < raw) ? extent / double(m) : resolution;
  }
  std::vector<Vec> grid;
  std::vector<std::size_t> idx(dim, 0);
  Vec g(dim);
  while (true) {
    for (std::size_t i = 0; i < dim; ++i) {
      g[i] = lo[i] + (double(idx[i]) + 0.5) * cell[i];
    }
    if (is_feasible(g, config)) grid.push_back(g);
    std::size_t d = dim;
    while (d-- > 0) {
      if (++idx[d] < counts[d]) break;
      idx[d] = 0;
      if (d == 0) return grid;
    }
  }
}

double feasible_volume_fraction(const EnvConfig& config) {
  Vec lo, hi;
  feasible_extent(config, lo, hi);
  double feas = 1.0, full = 1.0;
  for (std::size_t i = 0; i < config.goal_space.dim; ++i) {
    feas *= hi[i] - lo[i];
    full *= config.goal_space.hi[i] - config.goal_space.lo[i];
  }
  if (config.kind == EnvKind::multipath_maze) {
    for (const auto& w : config.maze.walls) {
      double v = 1.0;
      for (std::size_t i = 0; i < w.lo.size(); ++i) v *= w.hi[i] - w.lo[i];
      feas -= v;
    }
  }
  return feas / full;
}

}  // namespace goalgen
