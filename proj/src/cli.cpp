#include "goalgen/cli.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "goalgen/experiment.hpp"
#include "goalgen/gradcheck.hpp"

namespace goalgen {

namespace {


struct RunFlags {
  std::string config_path;
  std::string method;
  std::string env;
  std::size_t n = 0;
  long iters = -1;
  long long seed = -1;
  std::string out;
  double rmin = -1.0, rmax = -1.0;
  int horizon = -1;
  double dt = -1.0, tolerance = -1.0;
  int workers = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "experiment config file (JSON)");
  cmd->add_option("--method", f.method,
                  "uniform | uniform-l2 | gan-fit-all | oracle | goalgan | "
                  "goalgan-true-label | sagg-riac");
  cmd->add_option("--env", f.env, "multipath-maze | ndim-point-mass");
  cmd->add_option("--n", f.n, "goal dimension for ndim-point-mass");
  cmd->add_option("--iters", f.iters, "outer iterations");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--rmin", f.rmin, "GOID lower threshold");
  cmd->add_option("--rmax", f.rmax, "GOID upper threshold");
  cmd->add_option("--horizon", f.horizon, "episode horizon");
  cmd->add_option("--dt", f.dt, "timestep seconds");
  cmd->add_option("--tolerance", f.tolerance, "goal tolerance (meters)");
  cmd->add_option("--workers", f.workers, "parallel workers");
}

ExperimentConfig config_from_flags(const RunFlags& f) {
  ExperimentConfig cfg = parse_config_file(f.config_path);
  if (!f.method.empty()) cfg.method = method_from_name(f.method);
  if (!f.env.empty()) cfg.env.kind = f.env;
  if (f.n > 0) cfg.env.n = f.n;
  if (f.iters >= 0) cfg.iterations = int(f.iters);
  if (f.seed >= 0) cfg.seed = std::uint64_t(f.seed);
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.rmin > 0.0) cfg.goid.r_min = f.rmin;
  if (f.rmax > 0.0) cfg.goid.r_max = f.rmax;
  if (f.horizon > 0) cfg.env.horizon = f.horizon;
  if (f.dt > 0.0) cfg.env.dt = f.dt;
  if (f.tolerance > 0.0) cfg.env.tolerance = f.tolerance;
  if (f.workers > 0) cfg.workers = f.workers;
  cfg.validate();
  return cfg;
}

int do_run(const RunFlags& flags) {
  const ExperimentConfig cfg = config_from_flags(flags);
  const RunResult result = run_experiment(cfg);
  std::printf("run %s: final coverage %.4f (%llu env steps, %.1f s)\n",
              run_tag(cfg).c_str(), result.final_coverage,
              (unsigned long long)result.env_steps, result.wall_seconds);
  std::printf("curve: %s\n", result.curve_path.c_str());
  return 0;
}

// Runs configs with up to `workers` concurrent threads; each run is
// internally deterministic and writes its own files.
int run_many(std::vector<ExperimentConfig> configs, int workers) {
  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex print_mu;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        const RunResult r = run_experiment(configs[i]);
        std::lock_guard<std::mutex> lock(print_mu);
        std::printf("done %-28s coverage %.4f  (%.1f s)\n",
                    run_tag(configs[i]).c_str(), r.final_coverage, r.wall_seconds);
        std::fflush(stdout);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(print_mu);
        std::fprintf(stderr, "failed %s: %s\n", run_tag(configs[i]).c_str(),
                     e.what());
        failures.fetch_add(1);
      }
    }
  };
  const int nw = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return failures.load() ? 1 : 0;
}

int do_sweep(const RunFlags& flags, const std::string& study, int seeds,
             std::vector<std::size_t> dims, std::vector<std::string> methods) {
  if (study != "ndim") {
    throw std::invalid_argument("unknown sweep study: " + study);
  }
  if (dims.empty()) dims = {2, 3, 4, 5, 6};
  if (methods.empty()) {
    methods = {"goalgan", "uniform", "uniform-l2", "gan-fit-all"};
  }
  ExperimentConfig base = config_from_flags(flags);
  base.env.kind = "ndim-point-mass";
  if (flags.iters < 0) base.iterations = 200;
  std::vector<ExperimentConfig> configs;
  for (std::size_t n : dims) {
    for (const auto& m : methods) {
      for (int s = 0; s < seeds; ++s) {
        ExperimentConfig cfg = base;
        cfg.env.n = n;
        cfg.method = method_from_name(m);
        cfg.seed = std::uint64_t(s);
        cfg.validate();
        configs.push_back(std::move(cfg));
      }
    }
  }
  std::printf("sweep: %zu runs (%zu dims x %zu methods x %d seeds), %d workers\n",
              configs.size(), dims.size(), methods.size(), seeds, base.workers);
  return run_many(std::move(configs), base.workers);
}

int do_eval(const RunFlags& flags, const std::string& checkpoint, int rollouts) {
  ExperimentConfig cfg = config_from_flags(flags);
  if (rollouts > 0) cfg.eval.final_rollouts_per_goal = rollouts;
  const CoverageReport report = evaluate_checkpoint(checkpoint, cfg);
  std::printf("coverage %.4f over %zu grid goals (%d rollouts each)\n",
              report.mean, report.goals.size(), report.rollouts_per_goal);
  return 0;
}

int do_gradcheck() {
  GradCheckParams params;
  const auto reports = run_gradient_suite(params, 20240801ULL);
  bool all_pass = true;
  for (const auto& r : reports) {
    std::printf("%-30s configs %3d  max rel err %.3e  %s\n", r.name.c_str(),
                r.configs, r.max_rel_err, r.pass ? "PASS" : "FAIL");
    all_pass &= r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"goal-conditioned curriculum RL laboratory"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  add_run_flags(run_cmd, run_flags);

  RunFlags sweep_flags;
  std::string study = "ndim";
  int sweep_seeds = 5;
  std::vector<std::size_t> sweep_dims;
  std::vector<std::string> sweep_methods;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "multi-seed study over N x methods x seeds");
  add_run_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--study", study, "study name (ndim)");
  sweep_cmd->add_option("--seeds", sweep_seeds, "seeds per cell");
  sweep_cmd->add_option("--dims", sweep_dims, "goal dimensions");
  sweep_cmd->add_option("--methods", sweep_methods, "methods to sweep");

  RunFlags eval_flags;
  std::string checkpoint;
  int eval_rollouts = 0;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "coverage of a saved policy checkpoint");
  add_run_flags(eval_cmd, eval_flags);
  eval_cmd->add_option("--checkpoint", checkpoint, "policy checkpoint path")
      ->required();
  eval_cmd->add_option("--rollouts", eval_rollouts, "rollouts per grid goal");

  CLI::App* grad_cmd =
      app.add_subcommand("gradcheck", "finite-difference gradient suites");
  (void)grad_cmd;

  std::vector<std::string> argv_like = args;
  std::reverse(argv_like.begin(), argv_like.end());
  try {
    app.parse(argv_like);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return 0;
    }
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  try {
    if (run_cmd->parsed()) return do_run(run_flags);
    if (sweep_cmd->parsed()) {
      return do_sweep(sweep_flags, study, sweep_seeds, sweep_dims, sweep_methods);
    }
    if (eval_cmd->parsed()) return do_eval(eval_flags, checkpoint, eval_rollouts);
    if (grad_cmd->parsed()) return do_gradcheck();
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace goalgen
