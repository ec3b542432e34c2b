#include "goalgen/eval.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace goalgen {

CoverageReport estimate_coverage(const Agent& policy,
                                 const std::vector<Vec>& grid_goals,
                                 int rollouts_per_goal, const EnvConfig& env,
                                 std::uint64_t eval_seed, long iteration) {
  if (grid_goals.empty()) {
    throw std::invalid_argument("estimate_coverage: empty grid");
  }
  CoverageReport report;
  report.goals = grid_goals;
  report.estimates.resize(grid_goals.size());
  report.iteration = iteration;
  report.rollouts_per_goal = rollouts_per_goal;
  RolloutOptions options;
  options.require_feasible_goals = true;
  const std::uint64_t iter_seed = derive_seed(eval_seed, std::uint64_t(iteration));
  double total = 0.0;
  for (std::size_t gi = 0; gi < grid_goals.size(); ++gi) {
    int successes = 0;
    for (int k = 0; k < rollouts_per_goal; ++k) {
      Rng rng(derive_seed(iter_seed, gi * 1000003ULL + std::uint64_t(k)));
      const Trajectory traj =
          run_episode(policy, nullptr, grid_goals[gi], env, options, rng);
      successes += traj.success ? 1 : 0;
    }
    report.estimates[gi] = double(successes) / double(rollouts_per_goal);
    total += report.estimates[gi];
  }
  report.mean = total / double(grid_goals.size());
  return report;
}

std::vector<Vec> coverage_grid(const EnvConfig& env, double resolution,
                               int max_points_per_dim) {
  Vec lo, hi;
  feasible_extent(env, lo, hi);
  const std::size_t dim = env.goal_space.dim;
  std::vector<std::size_t> counts(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double extent = hi[i] - lo[i];
    auto m = std::size_t(std::floor(extent / resolution + 1e-9));
    if (m == 0) m = 1;
    if (dim >= 4 && max_points_per_dim > 0) {
      m = std::min(m, std::size_t(max_points_per_dim));
    }
    counts[i] = m;
  }
  std::vector<Vec> grid;
  std::vector<std::size_t> idx(dim, 0);
  Vec g(dim);
  while (true) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double cell = (hi[i] - lo[i]) / double(counts[i]);
      g[i] = lo[i] + (double(idx[i]) + 0.5) * cell;
    }
    if (is_feasible(g, env)) grid.push_back(g);
    std::size_t d = dim;
    bool done = true;
    while (d-- > 0) {
      if (++idx[d] < counts[d]) {
        done = false;
        break;
      }
      idx[d] = 0;
    }
    if (done) break;
  }
  return grid;
}

const char* goal_class_name(GoalClass c) {
  switch (c) {
    case GoalClass::low: return "low";
    case GoalClass::goid: return "goid";
    case GoalClass::high: return "high";
  }
  return "?";
}

GoalClass classify_fraction(double fraction, const GoidThresholds& thresholds) {
  if (thresholds.r_min <= fraction && fraction <= thresholds.r_max) {
    return GoalClass::goid;
  }
  if (fraction >= thresholds.r_max) return GoalClass::high;
  return GoalClass::low;
}

std::vector<GoalScatterRecord> classify_goals(const SuccessTable& table,
                                              const GoidThresholds& thresholds) {
  thresholds.validate();
  std::vector<GoalScatterRecord> out;
  out.reserve(table.size());
  for (const auto& [goal, stats] : table) {
    GoalScatterRecord rec;
    rec.goal = goal;
    rec.fraction = stats.fraction();
    rec.cls = classify_fraction(rec.fraction, thresholds);
    out.push_back(std::move(rec));
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& rows) {
  auto out = open_out(path);
  out << "iteration,env_steps,coverage,coverage_fresh,goid_fraction,"
         "buffer_size,disc_loss,gen_loss,mean_success,mean_kl,labeling_rollouts\n";
  for (const auto& r : rows) {
    out << r.iteration << ',' << r.env_steps << ',' << format_double(r.coverage)
        << ',' << r.coverage_fresh << ',' << format_double(r.goid_fraction)
        << ',' << r.buffer_size << ',' << format_double(r.disc_loss) << ','
        << format_double(r.gen_loss) << ',' << format_double(r.mean_success)
        << ',' << format_double(r.mean_kl) << ',' << r.labeling_rollouts << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<CurvePoint> read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<CurvePoint> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    CurvePoint p;
    auto next = [&]() -> std::string {
      std::getline(ss, field, ',');
      return field;
    };
    p.iteration = std::stol(next());
    p.env_steps = std::stoull(next());
    p.coverage = std::stod(next());
    p.coverage_fresh = std::stoi(next());
    p.goid_fraction = std::stod(next());
    p.buffer_size = std::stoul(next());
    p.disc_loss = std::stod(next());
    p.gen_loss = std::stod(next());
    p.mean_success = std::stod(next());
    p.mean_kl = std::stod(next());
    p.labeling_rollouts = std::stoull(next());
    rows.push_back(p);
  }
  return rows;
}

void write_scatter_csv(const std::string& path,
                       const std::vector<GoalScatterRecord>& records) {
  auto out = open_out(path);
  if (!records.empty()) {
    for (std::size_t d = 0; d < records.front().goal.size(); ++d) {
      out << 'g' << d << ',';
    }
  }
  out << "fraction,class\n";
  for (const auto& r : records) {
    for (double v : r.goal) out << format_double(v) << ',';
    out << format_double(r.fraction) << ',' << goal_class_name(r.cls) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_heatmap_csv(const std::string& path, const CoverageReport& report) {
  auto out = open_out(path);
  if (!report.goals.empty()) {
    for (std::size_t d = 0; d < report.goals.front().size(); ++d) {
      out << 'g' << d << ',';
    }
  }
  out << "estimate\n";
  for (std::size_t i = 0; i < report.goals.size(); ++i) {
    for (double v : report.goals[i]) out << format_double(v) << ',';
    out << format_double(report.estimates[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

// Maps goal-space coordinates to a 500x500 viewport.
struct SvgMap {
  double lo0, lo1, s0, s1;
  explicit SvgMap(const EnvConfig& env) {
    lo0 = env.goal_space.lo[0];
    lo1 = env.goal_space.lo[1];
    s0 = 500.0 / (env.goal_space.hi[0] - lo0);
    s1 = 500.0 / (env.goal_space.hi[1] - lo1);
  }
  double x(double g0) const { return (g0 - lo0) * s0; }
  double y(double g1) const { return 500.0 - (g1 - lo1) * s1; }
};

std::string heat_color(double v) {
  // blue (0) -> red (1)
  const int r = int(std::lround(255.0 * v));
  const int b = int(std::lround(255.0 * (1.0 - v)));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x30%02x", r, b);
  return buf;
}

void svg_walls(std::ofstream& out, const EnvConfig& env, const SvgMap& m) {
  if (env.kind != EnvKind::multipath_maze) return;
  for (const auto& w : env.maze.walls) {
    out << "<rect x='" << m.x(w.lo[0]) << "' y='" << m.y(w.hi[1]) << "' width='"
        << (w.hi[0] - w.lo[0]) * m.s0 << "' height='" << (w.hi[1] - w.lo[1]) * m.s1
        << "' fill='#444444'/>\n";
  }
}

}  // namespace

void write_heatmap_svg(const std::string& path, const CoverageReport& report,
                       const EnvConfig& env) {
  if (env.goal_space.dim < 2) return;
  auto out = open_out(path);
  const SvgMap m(env);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='500' height='500' "
         "viewBox='0 0 500 500'>\n<rect width='500' height='500' fill='#f0f0f0'/>\n";
  // Cell size from the first two goals that differ in g0 (fallback 0.5).
  double cell = 0.5;
  for (std::size_t i = 1; i < report.goals.size(); ++i) {
    const double d = std::abs(report.goals[i][0] - report.goals[0][0]);
    if (d > 1e-9) {
      cell = d;
      break;
    }
  }
  for (std::size_t i = 0; i < report.goals.size(); ++i) {
    const auto& g = report.goals[i];
    out << "<rect x='" << m.x(g[0] - cell / 2) << "' y='" << m.y(g[1] + cell / 2)
        << "' width='" << cell * m.s0 << "' height='" << cell * m.s1
        << "' fill='" << heat_color(report.estimates[i]) << "'/>\n";
  }
  svg_walls(out, env, m);
  out << "</svg>\n";
}

void write_scatter_svg(const std::string& path,
                       const std::vector<GoalScatterRecord>& records,
                       const EnvConfig& env) {
  if (env.goal_space.dim < 2) return;
  auto out = open_out(path);
  const SvgMap m(env);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='500' height='500' "
         "viewBox='0 0 500 500'>\n<rect width='500' height='500' fill='#ffffff'/>\n";
  svg_walls(out, env, m);
  for (const auto& r : records) {
    const char* color = r.cls == GoalClass::goid ? "#1f77dd"
                        : r.cls == GoalClass::high ? "#2ca02c"
                                                   : "#d62728";
    out << "<circle cx='" << m.x(r.goal[0]) << "' cy='" << m.y(r.goal[1])
        << "' r='3' fill='" << color << "'/>\n";
  }
  out << "</svg>\n";
}

}  // namespace goalgen
