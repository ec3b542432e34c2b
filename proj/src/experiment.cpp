#include "goalgen/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "goalgen/baselines.hpp"
#include "goalgen/kernels.hpp"
#include "goalgen/sagg_riac.hpp"
#include "goalgen/tensor_io.hpp"

#ifndef GOALGEN_VERSION
#define GOALGEN_VERSION "dev"
#endif

namespace goalgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunContext {
  ExperimentConfig cfg;
  EnvConfig env;
  SeedBank seeds;
  std::string tag;
  fs::path outdir;
  std::ofstream runlog;

  GaussianMlpPolicy policy;
  Mlp value_net;
  Adam value_adam;
  EpisodeSeeder rollout_seeder;
  EpisodeSeeder labeling_seeder;
  Rng goals_rng;
  Rng value_rng;

  std::vector<CurvePoint> curve;
  std::vector<Vec> eval_grid;
  std::uint64_t env_steps = 0;
  std::uint64_t labeling_rollouts_total = 0;
};

double grid_resolution(const ExperimentConfig& cfg) {
  return env_kind_from_name(cfg.env.kind) == EnvKind::multipath_maze
             ? cfg.eval.grid_resolution_maze
             : cfg.eval.grid_resolution_ndim;
}

void log_trpo_steps(RunContext& ctx, long iteration,
                    const std::vector<TrpoResult>& steps, double mean_success) {
  int k = 0;
  for (const auto& s : steps) {
    ctx.runlog << "iter " << iteration << " step " << k++ << " accepted "
               << (s.accepted ? 1 : 0) << " mean_kl " << format_double(s.mean_kl)
               << " surrogate_improvement "
               << format_double(s.surrogate_after - s.surrogate_before)
               << " mean_success " << format_double(mean_success);
    if (!s.note.empty()) ctx.runlog << " note " << s.note;
    ctx.runlog << '\n';
  }
  ctx.runlog.flush();
}

CurvePoint make_point(const RunContext& ctx, long iteration) {
  CurvePoint p;
  p.iteration = iteration;
  p.env_steps = ctx.env_steps;
  if (!ctx.curve.empty()) p.coverage = ctx.curve.back().coverage;
  return p;
}

void evaluate_and_emit(RunContext& ctx, const Agent& policy, long iteration,
                       CurvePoint& point, const SuccessTable* table,
                       int rollouts_per_goal) {
  const CoverageReport report =
      estimate_coverage(policy, ctx.eval_grid, rollouts_per_goal, ctx.env,
                        ctx.seeds.stream_seed("eval"), iteration);
  point.coverage = report.mean;
  point.coverage_fresh = 1;
  char iter_buf[16];
  std::snprintf(iter_buf, sizeof(iter_buf), "%04ld", iteration);
  write_heatmap_csv((ctx.outdir / ("heatmap_" + ctx.tag + "_iter" + iter_buf + ".csv")).string(),
                    report);
  if (table) {
    const auto records = classify_goals(*table, ctx.cfg.goid);
    write_scatter_csv((ctx.outdir / ("scatter_" + ctx.tag + "_iter" + iter_buf + ".csv")).string(),
                      records);
  }
}

// Per-method iteration driver. Returns the curve row for this iteration.
class MethodDriver {
 public:
  virtual ~MethodDriver() = default;
  virtual CurvePoint iterate(RunContext& ctx, long iteration) = 0;
  virtual const SuccessTable* last_table() const = 0;
  virtual const Agent& agent(const RunContext& ctx) const { return ctx.policy; }
  virtual void save_extra(RunContext&, TensorFile&) const {}
};

// goalgan / goalgan-true-label / gan-fit-all share the curriculum loop and
// differ only in the labeler handed to the GAN.
class GanDriver final : public MethodDriver {
 public:
  GanDriver(RunContext& ctx, std::uint64_t label_cost_per_iter)
      : label_cost_(label_cost_per_iter) {
    state_.policy = ctx.policy;
    state_.value_net = ctx.value_net;
    state_.value_adam.lr = ctx.cfg.rl.value_lr;
    state_.thresholds = ctx.cfg.goid;
    state_.mixture = ctx.cfg.mixture;
    state_.gan_config = ctx.cfg.gan;
    state_.replay.eps = ctx.env.goal_space.tolerance;
    state_.gan = make_gan(ctx.cfg.gan, ctx.env.goal_space.dim,
                          ctx.seeds.stream_seed("gan-init"));
    state_.rollout_seeder.stream_seed = ctx.seeds.stream_seed("rollout");
    state_.gan_noise_rng = ctx.seeds.stream("gan-noise");
    state_.gan_train_rng = ctx.seeds.stream("gan-train");
    state_.replay_rng = ctx.seeds.stream("replay");
    state_.value_rng = ctx.seeds.stream("value");

    if (!ctx.cfg.pretrained_gan.empty()) {
      const TensorFile tf = load_tensors(ctx.cfg.pretrained_gan);
      state_.gan.generator = get_mlp(tf, "generator");
      state_.gan.discriminator = get_mlp(tf, "discriminator");
    } else {
      EpisodeSeeder init_seeder{ctx.seeds.stream_seed("gan-init-rollouts")};
      Rng init_rng = ctx.seeds.stream("gan-init-train");
      initialize_gan(state_.gan, state_.policy, ctx.env, ctx.cfg.gan,
                     init_seeder, init_rng);
    }
  }

  void set_labeler(Labeler labeler) { labeler_ = std::move(labeler); }

  CurvePoint iterate(RunContext& ctx, long iteration) override {
    const IterationRecord rec =
        run_outer_iteration(state_, ctx.env, ctx.cfg.rl, labeler_);
    ctx.env_steps = rec.env_steps;
    ctx.policy = state_.policy;
    log_trpo_steps(ctx, iteration, rec.trpo_steps, rec.mean_success);
    ctx.runlog << "iter " << iteration << " gan disc_loss "
               << format_double(rec.disc_loss) << " gen_loss "
               << format_double(rec.gen_loss) << " skipped " << rec.gan_skipped
               << " labeled " << rec.n_labeled << '\n';
    table_ = std::move(scratch_table_);
    CurvePoint p = make_point(ctx, iteration);
    p.goid_fraction = rec.goid_fraction;
    p.buffer_size = rec.buffer_size;
    p.disc_loss = rec.disc_loss;
    p.gen_loss = rec.gen_loss;
    p.mean_success = rec.mean_success;
    p.mean_kl = rec.mean_kl;
    p.labeling_rollouts = label_cost_;
    return p;
  }

  const SuccessTable* last_table() const override { return &table_; }

  void save_extra(RunContext&, TensorFile& tf) const override {
    put_mlp(tf, "generator", state_.gan.generator);
    put_mlp(tf, "discriminator", state_.gan.discriminator);
  }

  // Labelers stash the iteration's table here for scatter emission.
  SuccessTable scratch_table_;

 private:
  CurriculumState state_;
  Labeler labeler_;
  SuccessTable table_;
  std::uint64_t label_cost_ = 0;
};

class UniformDriver final : public MethodDriver {
 public:
  UniformDriver(RunContext& ctx, bool l2) : l2_(l2) {
    rollout_seeder_.stream_seed = ctx.seeds.stream_seed("rollout");
    options_.reward = l2 ? RewardMode::negative_l2 : RewardMode::indicator;
    options_.terminate_on_success = !l2;
  }

  CurvePoint iterate(RunContext& ctx, long iteration) override {
    const std::size_t count = ctx.cfg.mixture.from_gan + ctx.cfg.mixture.from_replay;
    const auto goals = uniform_goals(ctx.env.goal_space, count, ctx.goals_rng);
    const PolicyUpdateStats stats =
        update_policy(ctx.policy, ctx.value_net, ctx.value_adam, goals, ctx.env,
                      ctx.cfg.rl, options_, rollout_seeder_, ctx.value_rng);
    ctx.env_steps += stats.env_steps;
    log_trpo_steps(ctx, iteration, stats.trpo_steps, stats.mean_success);
    table_ = stats.table;
    CurvePoint p = make_point(ctx, iteration);
    fill_from_stats(p, stats, ctx.cfg.goid);
    p.labeling_rollouts = std::uint64_t(ctx.cfg.rl.inner_iterations) *
                          std::uint64_t(ctx.cfg.rl.episodes_per_iteration);
    return p;
  }

  const SuccessTable* last_table() const override { return &table_; }

  static void fill_from_stats(CurvePoint& p, const PolicyUpdateStats& stats,
                              const GoidThresholds& thresholds) {
    const auto labeled = label_goals(stats.table, thresholds);
    std::size_t positives = 0;
    for (const auto& lg : labeled) positives += lg.label;
    p.goid_fraction = labeled.empty() ? 0.0 : double(positives) / double(labeled.size());
    p.mean_success = stats.mean_success;
    double kl = 0.0;
    std::size_t accepted = 0;
    for (const auto& s : stats.trpo_steps) {
      if (s.accepted) {
        kl += s.mean_kl;
        ++accepted;
      }
    }
    p.mean_kl = accepted ? kl / double(accepted) : 0.0;
  }

 private:
  bool l2_ = false;
  RolloutOptions options_;
  EpisodeSeeder rollout_seeder_;
  SuccessTable table_;
};

class OracleDriver final : public MethodDriver {
 public:
  explicit OracleDriver(RunContext& ctx) {
    rollout_seeder_.stream_seed = ctx.seeds.stream_seed("rollout");
    labeling_seeder_.stream_seed = ctx.seeds.stream_seed("labeling");
  }

  CurvePoint iterate(RunContext& ctx, long iteration) override {
    const std::size_t count = ctx.cfg.mixture.from_gan + ctx.cfg.mixture.from_replay;
    const RejectionOracleResult res =
        rejection_sample_goid(ctx.policy, ctx.env, ctx.cfg.goid, ctx.cfg.oracle,
                              count, labeling_seeder_, ctx.goals_rng);
    ctx.labeling_rollouts_total += res.rollouts_spent;
    std::vector<Vec> goals = res.goals;
    if (goals.empty()) {
      // Nothing in GOID under the budget; train on feasible uniform goals.
      goals = uniform_feasible_goals(ctx.env, count, ctx.goals_rng);
      ctx.runlog << "iter " << iteration << " oracle fallback-to-uniform\n";
    }
    RolloutOptions options;
    const PolicyUpdateStats stats =
        update_policy(ctx.policy, ctx.value_net, ctx.value_adam, goals, ctx.env,
                      ctx.cfg.rl, options, rollout_seeder_, ctx.value_rng);
    ctx.env_steps += stats.env_steps;
    log_trpo_steps(ctx, iteration, stats.trpo_steps, stats.mean_success);
    ctx.runlog << "iter " << iteration << " oracle candidates "
               << res.candidates_tested << " accepted " << res.goals.size()
               << " rollouts " << res.rollouts_spent << " exhausted "
               << res.budget_exhausted << '\n';
    table_ = stats.table;
    CurvePoint p = make_point(ctx, iteration);
    UniformDriver::fill_from_stats(p, stats, ctx.cfg.goid);
    p.labeling_rollouts = res.rollouts_spent;
    return p;
  }

  const SuccessTable* last_table() const override { return &table_; }

 private:
  EpisodeSeeder rollout_seeder_;
  EpisodeSeeder labeling_seeder_;
  SuccessTable table_;
};

class SaggDriver final : public MethodDriver {
 public:
  explicit SaggDriver(RunContext& ctx) {
    rollout_seeder_.stream_seed = ctx.seeds.stream_seed("rollout");
    state_ = make_sagg_state(ctx.env.goal_space);
    sagg_ = ctx.cfg.sagg;
    sagg_.t_max = ctx.env.horizon;
    budget_ = std::uint64_t(ctx.cfg.rl.inner_iterations) *
              std::uint64_t(ctx.cfg.rl.episodes_per_iteration) *
              std::uint64_t(ctx.env.horizon);
  }

  CurvePoint iterate(RunContext& ctx, long iteration) override {
    const SaggIterationStats stats = sagg_riac_iteration(
        state_, ctx.policy, ctx.value_net, ctx.value_adam, sagg_, ctx.env,
        ctx.cfg.rl, budget_, rollout_seeder_, ctx.goals_rng, ctx.value_rng);
    ctx.env_steps += stats.env_steps;
    log_trpo_steps(ctx, iteration, {stats.trpo}, stats.mean_success);
    ctx.runlog << "iter " << iteration << " sagg regions " << stats.region_count
               << " episodes " << stats.episodes << '\n';
    CurvePoint p = make_point(ctx, iteration);
    p.mean_success = stats.mean_success;
    p.mean_kl = stats.trpo.accepted ? stats.trpo.mean_kl : 0.0;
    p.buffer_size = stats.region_count;  // region count stands in
    return p;
  }

  const SuccessTable* last_table() const override { return nullptr; }

 private:
  SaggState state_;
  SaggRiacConfig sagg_;
  EpisodeSeeder rollout_seeder_;
  std::uint64_t budget_ = 0;
};

std::unique_ptr<MethodDriver> make_driver(RunContext& ctx) {
  const std::uint64_t reuse_cost =
      std::uint64_t(ctx.cfg.rl.inner_iterations) *
      std::uint64_t(ctx.cfg.rl.episodes_per_iteration);
  switch (ctx.cfg.method) {
    case Method::goalgan: {
      auto driver = std::make_unique<GanDriver>(ctx, reuse_cost);
      GanDriver* raw = driver.get();
      driver->set_labeler([raw, thresholds = ctx.cfg.goid](
                              const SuccessTable& table,
                              const GaussianMlpPolicy&, const std::vector<Vec>&) {
        raw->scratch_table_ = table;
        return label_goals(table, thresholds);
      });
      return driver;
    }
    case Method::gan_fit_all: {
      auto driver = std::make_unique<GanDriver>(ctx, reuse_cost);
      GanDriver* raw = driver.get();
      driver->set_labeler([raw](const SuccessTable& table,
                                const GaussianMlpPolicy&, const std::vector<Vec>&) {
        raw->scratch_table_ = table;
        return gan_fit_all_labels(table);
      });
      return driver;
    }
    case Method::goalgan_true_label: {
      auto driver = std::make_unique<GanDriver>(
          ctx,
          3 * std::uint64_t(ctx.cfg.mixture.from_gan + ctx.cfg.mixture.from_replay));
      GanDriver* raw = driver.get();
      EpisodeSeeder seeder{ctx.seeds.stream_seed("labeling")};
      driver->set_labeler([raw, seeder, thresholds = ctx.cfg.goid,
                           env = ctx.env](const SuccessTable& table,
                                          const GaussianMlpPolicy& policy,
                                          const std::vector<Vec>& goals) mutable {
        raw->scratch_table_ = table;
        return true_label_goals(policy, goals, thresholds, env, seeder, 3);
      });
      return driver;
    }
    case Method::uniform:
      return std::make_unique<UniformDriver>(ctx, false);
    case Method::uniform_l2:
      return std::make_unique<UniformDriver>(ctx, true);
    case Method::oracle:
      return std::make_unique<OracleDriver>(ctx);
    case Method::sagg_riac:
      return std::make_unique<SaggDriver>(ctx);
  }
  throw std::logic_error("unreachable");
}

void write_manifest(const RunContext& ctx, const RunResult& result,
                    double final_coverage) {
  json j;
  j["config"] = json::parse(config_to_json(ctx.cfg));
  j["run_tag"] = ctx.tag;
  j["code_version"] = GOALGEN_VERSION;
  j["kernel_backend"] = kern::backend_name(kern::active_backend());
  j["eval_grid_size"] = ctx.eval_grid.size();
  j["final_coverage"] = final_coverage;
  j["env_steps"] = ctx.env_steps;
  j["labeling_rollouts_total"] = ctx.labeling_rollouts_total;
  j["feasible_volume_fraction"] = feasible_volume_fraction(ctx.env);
  j["wall_clock_seconds"] = result.wall_seconds;
  j["artifacts"] = {{"curve", result.curve_path}, {"policy", result.policy_path}};
  std::ofstream out(ctx.outdir / ("manifest_" + ctx.tag + ".json"));
  if (!out) throw std::runtime_error("cannot write manifest");
  out << j.dump(2) << '\n';
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  RunContext ctx;
  ctx.cfg = cfg;
  ctx.env = build_env(cfg);
  ctx.seeds.master = cfg.seed;
  ctx.tag = run_tag(cfg);
  ctx.outdir = fs::path(cfg.output_dir);
  fs::create_directories(ctx.outdir);
  ctx.runlog.open(ctx.outdir / ("log_" + ctx.tag + ".txt"));

  ctx.policy = make_policy(ctx.env, cfg.policy.hidden,
                           ctx.seeds.stream_seed("policy-init"),
                           cfg.policy.init_log_std);
  ctx.value_net =
      make_mlp(ctx.env.obs_dim() + ctx.env.goal_space.dim, cfg.policy.hidden, 1,
               Act::tanh, ctx.seeds.stream_seed("value-init"));
  ctx.value_adam.lr = cfg.rl.value_lr;
  ctx.goals_rng = ctx.seeds.stream("goals");
  ctx.value_rng = ctx.seeds.stream("value-fit");
  ctx.eval_grid =
      coverage_grid(ctx.env, grid_resolution(cfg), cfg.eval.max_points_per_dim);

  auto driver = make_driver(ctx);

  RunResult result;

  // Initial coverage point (iteration 0).
  {
    CurvePoint p;
    evaluate_and_emit(ctx, driver->agent(ctx), 0, p, nullptr,
                      cfg.eval.rollouts_per_goal);
    ctx.curve.push_back(p);
  }

  for (long i = 1; i <= cfg.iterations; ++i) {
    CurvePoint p = driver->iterate(ctx, i);
    ctx.labeling_rollouts_total += p.labeling_rollouts;
    const bool eval_now = (cfg.eval.cadence > 0 && i % cfg.eval.cadence == 0) ||
                          i == cfg.iterations;
    if (eval_now) {
      evaluate_and_emit(ctx, driver->agent(ctx), i, p, driver->last_table(),
                        cfg.eval.rollouts_per_goal);
    }
    ctx.curve.push_back(p);
  }

  // Final, lower-variance coverage estimate.
  const CoverageReport final_report = estimate_coverage(
      driver->agent(ctx), ctx.eval_grid, cfg.eval.final_rollouts_per_goal,
      ctx.env, ctx.seeds.stream_seed("eval-final"), cfg.iterations);
  result.final_coverage = final_report.mean;
  write_heatmap_csv((ctx.outdir / ("heatmap_" + ctx.tag + "_final.csv")).string(),
                    final_report);
  if (cfg.eval.render_svg && ctx.env.goal_space.dim >= 2) {
    write_heatmap_svg((ctx.outdir / ("heatmap_" + ctx.tag + "_final.svg")).string(),
                      final_report, ctx.env);
    if (const SuccessTable* table = driver->last_table()) {
      write_scatter_svg((ctx.outdir / ("scatter_" + ctx.tag + "_final.svg")).string(),
                        classify_goals(*table, cfg.goid), ctx.env);
    }
  }

  result.curve_path = (ctx.outdir / ("curve_" + ctx.tag + ".csv")).string();
  write_curve_csv(result.curve_path, ctx.curve);
  result.curve = ctx.curve;

  TensorFile ckpt;
  put_mlp(ckpt, "policy", ctx.policy.net);
  ckpt.put("policy/log_std", ctx.policy.log_std);
  put_mlp(ckpt, "value", ctx.value_net);
  driver->save_extra(ctx, ckpt);
  result.policy_path = (ctx.outdir / ("policy_" + ctx.tag + ".bin")).string();
  save_tensors(ckpt, result.policy_path);

  result.env_steps = ctx.env_steps;
  result.labeling_rollouts = ctx.labeling_rollouts_total;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.manifest_path = (ctx.outdir / ("manifest_" + ctx.tag + ".json")).string();
  write_manifest(ctx, result, result.final_coverage);
  return result;
}

CoverageReport evaluate_checkpoint(const std::string& policy_path,
                                   const ExperimentConfig& cfg) {
  const EnvConfig env = build_env(cfg);
  const TensorFile tf = load_tensors(policy_path);
  GaussianMlpPolicy policy;
  policy.net = get_mlp(tf, "policy");
  policy.log_std = tf.vec("policy/log_std");
  const auto grid =
      coverage_grid(env, grid_resolution(cfg), cfg.eval.max_points_per_dim);
  SeedBank seeds{cfg.seed};
  return estimate_coverage(policy, grid, cfg.eval.final_rollouts_per_goal, env,
                           seeds.stream_seed("eval-checkpoint"), 0);
}

}  // namespace goalgen
