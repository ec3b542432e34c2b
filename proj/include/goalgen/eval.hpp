#pragma once

#include <string>
#include <vector>

#include "goalgen/goal_gan.hpp"
#include "goalgen/rollout.hpp"

namespace goalgen {

struct CoverageReport {
  std::vector<Vec> goals;
  Vec estimates;  // per-goal success fraction in [0, 1]
  double mean = 0.0;
  long iteration = 0;
  int rollouts_per_goal = 0;
};

// Success fraction per grid goal from fresh evaluation episodes; the mean is
// the coverage estimate. Episode RNGs derive from (seed, iteration, goal
// index, rollout index), so two policies evaluated at the same point see the
// same random streams.
CoverageReport estimate_coverage(const Agent& policy,
                                 const std::vector<Vec>& grid_goals,
                                 int rollouts_per_goal, const EnvConfig& env,
                                 std::uint64_t eval_seed, long iteration);

// Evaluation grid: like feasible_goal_grid but never empty — dimensions
// narrower than the resolution contribute their midpoint, and for n >= 4 the
// per-dimension point count is capped.
std::vector<Vec> coverage_grid(const EnvConfig& env, double resolution,
                               int max_points_per_dim);

enum class GoalClass { low, goid, high };
const char* goal_class_name(GoalClass c);

struct GoalScatterRecord {
  Vec goal;
  double fraction = 0.0;
  GoalClass cls = GoalClass::low;
};

// GOID takes precedence at the r_max boundary so the classification agrees
// with label_goals.
GoalClass classify_fraction(double fraction, const GoidThresholds& thresholds);
std::vector<GoalScatterRecord> classify_goals(const SuccessTable& table,
                                              const GoidThresholds& thresholds);

// One row per outer iteration of a run.
struct CurvePoint {
  long iteration = 0;
  std::uint64_t env_steps = 0;
  double coverage = 0.0;   // most recent evaluation
  int coverage_fresh = 0;  // 1 when evaluated at this iteration
  double goid_fraction = 0.0;
  std::size_t buffer_size = 0;
  double disc_loss = 0.0;
  double gen_loss = 0.0;
  double mean_success = 0.0;
  double mean_kl = 0.0;
  std::uint64_t labeling_rollouts = 0;  // episodes behind this iteration's labels
};

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& rows);
std::vector<CurvePoint> read_curve_csv(const std::string& path);
void write_scatter_csv(const std::string& path,
                       const std::vector<GoalScatterRecord>& records);
void write_heatmap_csv(const std::string& path, const CoverageReport& report);
// 2-d environments only: colored cells / class-colored points.
void write_heatmap_svg(const std::string& path, const CoverageReport& report,
                       const EnvConfig& env);
void write_scatter_svg(const std::string& path,
                       const std::vector<GoalScatterRecord>& records,
                       const EnvConfig& env);

// Deterministic shortest round-trip formatting used by every emitted table.
std::string format_double(double v);

}  // namespace goalgen
