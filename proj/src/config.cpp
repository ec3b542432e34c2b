#include "goalgen/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace goalgen {

using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::goalgan: return "goalgan";
    case Method::goalgan_true_label: return "goalgan-true-label";
    case Method::gan_fit_all: return "gan-fit-all";
    case Method::uniform: return "uniform";
    case Method::uniform_l2: return "uniform-l2";
    case Method::oracle: return "oracle";
    case Method::sagg_riac: return "sagg-riac";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::goalgan, Method::goalgan_true_label,
                   Method::gan_fit_all, Method::uniform, Method::uniform_l2,
                   Method::oracle, Method::sagg_riac}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method: " + name);
}

void ExperimentConfig::validate() const {
  rl.validate();
  goid.validate();
  sagg.validate();
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (env.n < 2) throw std::invalid_argument("env.n must be >= 2");
  env_kind_from_name(env.kind);
}

namespace {

class StrictReader {
 public:
  StrictReader(const json& j, std::string prefix)
      : j_(j), prefix_(std::move(prefix)) {
    if (!j.is_object()) {
      throw std::invalid_argument("config section " + display() +
                                  " must be an object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) unread_.insert(it.key());
  }

  ~StrictReader() = default;

  template <typename T>
  void get(const char* key, T& out) {
    auto it = j_.find(key);
    if (it == j_.end()) return;
    unread_.erase(key);
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw std::invalid_argument("config key " + path(key) +
                                  " has the wrong type");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* section(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    unread_.erase(key);
    return &*it;
  }

  void finish() const {
    if (!unread_.empty()) {
      throw std::invalid_argument("unknown config key: " + path(unread_.begin()->c_str()));
    }
  }

 private:
  std::string display() const { return prefix_.empty() ? "<root>" : prefix_; }
  std::string path(const char* key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + key;
  }
  const json& j_;
  std::string prefix_;
  std::set<std::string> unread_;
};

void read_rl(const json& j, RlConfig& rl) {
  StrictReader r(j, "rl");
  r.get("gamma", rl.gamma);
  r.get("lambda", rl.gae_lambda);
  r.get("kl_delta", rl.kl_delta);
  r.get("inner_iterations", rl.inner_iterations);
  r.get("episodes_per_iteration", rl.episodes_per_iteration);
  r.get("cg_iterations", rl.cg_iterations);
  r.get("cg_damping", rl.cg_damping);
  r.get("fvp_stride", rl.fvp_stride);
  r.get("backtrack_factor", rl.backtrack_factor);
  r.get("max_backtracks", rl.max_backtracks);
  r.get("value_fit_passes", rl.value_fit_passes);
  r.get("value_lr", rl.value_lr);
  r.get("value_minibatch", rl.value_minibatch);
  r.get("rollout_workers", rl.rollout_workers);
  r.finish();
}

void read_env(const json& j, EnvOverrides& env) {
  StrictReader r(j, "env");
  r.get("kind", env.kind);
  r.get("n", env.n);
  r.get("horizon", env.horizon);
  r.get("dt", env.dt);
  r.get("tolerance", env.tolerance);
  r.finish();
}

void read_goid(const json& j, GoidThresholds& t) {
  StrictReader r(j, "goid");
  r.get("r_min", t.r_min);
  r.get("r_max", t.r_max);
  r.finish();
}

void read_gan(const json& j, ExperimentConfig& cfg) {
  StrictReader r(j, "gan");
  r.get("noise_dim", cfg.gan.noise_dim);
  r.get("generator_hidden", cfg.gan.generator_hidden);
  r.get("discriminator_hidden", cfg.gan.discriminator_hidden);
  r.get("iterations", cfg.gan.iterations);
  r.get("minibatch", cfg.gan.minibatch);
  r.get("lr", cfg.gan.lr);
  r.get("output_noise_std", cfg.gan.output_noise_std);
  r.get("init_steps", cfg.gan.init_steps);
  r.get("init_episodes", cfg.gan.init_episodes);
  r.get("goals_from_gan", cfg.mixture.from_gan);
  r.get("goals_from_replay", cfg.mixture.from_replay);
  r.get("pretrained_path", cfg.pretrained_gan);
  r.finish();
}

void read_policy(const json& j, PolicyConfig& p) {
  StrictReader r(j, "policy");
  r.get("hidden", p.hidden);
  r.get("init_log_std", p.init_log_std);
  r.finish();
}

void read_sagg(const json& j, SaggRiacConfig& s) {
  StrictReader r(j, "sagg");
  r.get("window", s.window);
  r.get("eps_max", s.eps_max);
  r.get("eps_competence", s.eps_competence);
  r.get("t_max", s.t_max);
  r.get("n_new", s.n_new);
  r.get("g_max", s.g_max);
  if (r.has("mode_probs")) {
    std::vector<double> probs;
    r.get("mode_probs", probs);
    if (probs.size() != 3) {
      throw std::invalid_argument("sagg.mode_probs needs 3 entries");
    }
    s.p1 = probs[0];
    s.p2 = probs[1];
    s.p3 = probs[2];
  }
  r.get("mode3_variance", s.mode3_variance);
  r.finish();
}

void read_oracle(const json& j, RejectionOracleConfig& o) {
  StrictReader r(j, "oracle");
  r.get("rollouts_per_candidate", o.rollouts_per_candidate);
  r.get("candidate_budget", o.candidate_budget);
  r.finish();
}

void read_eval(const json& j, EvalConfig& e) {
  StrictReader r(j, "eval");
  r.get("cadence", e.cadence);
  r.get("rollouts_per_goal", e.rollouts_per_goal);
  r.get("final_rollouts_per_goal", e.final_rollouts_per_goal);
  r.get("grid_resolution_maze", e.grid_resolution_maze);
  r.get("grid_resolution_ndim", e.grid_resolution_ndim);
  r.get("max_points_per_dim", e.max_points_per_dim);
  r.get("render_svg", e.render_svg);
  r.finish();
}

ExperimentConfig parse_json(const json& j) {
  ExperimentConfig cfg;
  if (const char* root = std::getenv("GOALGEN_OUTPUT_ROOT"); root && *root) {
    cfg.output_dir = root;
  }
  StrictReader r(j, "");
  std::string method = method_name(cfg.method);
  r.get("method", method);
  cfg.method = method_from_name(method);
  if (const json* s = r.section("env")) read_env(*s, cfg.env);
  r.get("iterations", cfg.iterations);
  r.get("seed", cfg.seed);
  r.get("output_dir", cfg.output_dir);
  r.get("workers", cfg.workers);
  if (const json* s = r.section("rl")) read_rl(*s, cfg.rl);
  if (const json* s = r.section("goid")) read_goid(*s, cfg.goid);
  if (const json* s = r.section("gan")) read_gan(*s, cfg);
  if (const json* s = r.section("policy")) read_policy(*s, cfg.policy);
  if (const json* s = r.section("sagg")) read_sagg(*s, cfg.sagg);
  if (const json* s = r.section("oracle")) read_oracle(*s, cfg.oracle);
  if (const json* s = r.section("eval")) read_eval(*s, cfg.eval);
  r.finish();
  cfg.validate();
  return cfg;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    j = json::object();
  } else {
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
  }
  return parse_json(j);
}

ExperimentConfig parse_config_file(const std::string& path) {
  if (path.empty()) return parse_config_text("");
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["method"] = method_name(cfg.method);
  j["env"] = {{"kind", cfg.env.kind},
              {"n", cfg.env.n},
              {"horizon", cfg.env.horizon},
              {"dt", cfg.env.dt},
              {"tolerance", cfg.env.tolerance}};
  j["iterations"] = cfg.iterations;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["workers"] = cfg.workers;
  j["rl"] = {{"gamma", cfg.rl.gamma},
             {"lambda", cfg.rl.gae_lambda},
             {"kl_delta", cfg.rl.kl_delta},
             {"inner_iterations", cfg.rl.inner_iterations},
             {"episodes_per_iteration", cfg.rl.episodes_per_iteration},
             {"cg_iterations", cfg.rl.cg_iterations},
             {"cg_damping", cfg.rl.cg_damping},
             {"fvp_stride", cfg.rl.fvp_stride},
             {"backtrack_factor", cfg.rl.backtrack_factor},
             {"max_backtracks", cfg.rl.max_backtracks},
             {"value_fit_passes", cfg.rl.value_fit_passes},
             {"value_lr", cfg.rl.value_lr},
             {"value_minibatch", cfg.rl.value_minibatch},
             {"rollout_workers", cfg.rl.rollout_workers}};
  j["goid"] = {{"r_min", cfg.goid.r_min}, {"r_max", cfg.goid.r_max}};
  j["gan"] = {{"noise_dim", cfg.gan.noise_dim},
              {"generator_hidden", cfg.gan.generator_hidden},
              {"discriminator_hidden", cfg.gan.discriminator_hidden},
              {"iterations", cfg.gan.iterations},
              {"minibatch", cfg.gan.minibatch},
              {"lr", cfg.gan.lr},
              {"output_noise_std", cfg.gan.output_noise_std},
              {"init_steps", cfg.gan.init_steps},
              {"init_episodes", cfg.gan.init_episodes},
              {"goals_from_gan", cfg.mixture.from_gan},
              {"goals_from_replay", cfg.mixture.from_replay},
              {"pretrained_path", cfg.pretrained_gan}};
  j["policy"] = {{"hidden", cfg.policy.hidden},
                 {"init_log_std", cfg.policy.init_log_std}};
  j["sagg"] = {{"window", cfg.sagg.window},
               {"eps_max", cfg.sagg.eps_max},
               {"eps_competence", cfg.sagg.eps_competence},
               {"t_max", cfg.sagg.t_max},
               {"n_new", cfg.sagg.n_new},
               {"g_max", cfg.sagg.g_max},
               {"mode_probs", {cfg.sagg.p1, cfg.sagg.p2, cfg.sagg.p3}},
               {"mode3_variance", cfg.sagg.mode3_variance}};
  j["oracle"] = {{"rollouts_per_candidate", cfg.oracle.rollouts_per_candidate},
                 {"candidate_budget", cfg.oracle.candidate_budget}};
  j["eval"] = {{"cadence", cfg.eval.cadence},
               {"rollouts_per_goal", cfg.eval.rollouts_per_goal},
               {"final_rollouts_per_goal", cfg.eval.final_rollouts_per_goal},
               {"grid_resolution_maze", cfg.eval.grid_resolution_maze},
               {"grid_resolution_ndim", cfg.eval.grid_resolution_ndim},
               {"max_points_per_dim", cfg.eval.max_points_per_dim},
               {"render_svg", cfg.eval.render_svg}};
  return j.dump(2);
}

EnvConfig build_env(const ExperimentConfig& cfg) {
  const EnvKind kind = env_kind_from_name(cfg.env.kind);
  EnvConfig env = kind == EnvKind::multipath_maze ? make_maze_config()
                                                  : make_ndim_config(cfg.env.n);
  env.horizon = cfg.env.horizon;
  env.dt = cfg.env.dt;
  if (cfg.env.tolerance > 0.0) env.goal_space.tolerance = cfg.env.tolerance;
  return env;
}

std::string env_tag(const ExperimentConfig& cfg) {
  if (env_kind_from_name(cfg.env.kind) == EnvKind::multipath_maze) return "maze";
  return "pm" + std::to_string(cfg.env.n) + "d";
}

std::string run_tag(const ExperimentConfig& cfg) {
  return method_name(cfg.method) + "_" + env_tag(cfg) + "_seed" +
         std::to_string(cfg.seed);
}

}  // namespace goalgen
