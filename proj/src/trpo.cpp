#include "goalgen/trpo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "goalgen/kernels.hpp"

namespace goalgen {

void RlConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw std::invalid_argument("gae_lambda must be in [0, 1]");
  if (!(kl_delta > 0.0)) throw std::invalid_argument("kl_delta must be > 0");
  if (inner_iterations <= 0 || episodes_per_iteration <= 0) {
    throw std::invalid_argument("iteration counts must be positive");
  }
}

GaeResult compute_gae(const Trajectory& trajectory, double gamma, double lambda) {
  const std::size_t n = trajectory.steps.size();
  GaeResult out;
  out.advantages.resize(n);
  out.value_targets.resize(n);
  double gae = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double v = trajectory.steps[i].value;
    const double v_next = (i + 1 < n) ? trajectory.steps[i + 1].value : 0.0;
    const double delta = trajectory.steps[i].reward + gamma * v_next - v;
    gae = delta + gamma * lambda * gae;
    out.advantages[i] = gae;
    out.value_targets[i] = gae + v;
  }
  return out;
}

namespace {

std::vector<const TimeStep*> flatten_steps(const std::vector<Trajectory>& trajs) {
  std::vector<const TimeStep*> steps;
  for (const auto& t : trajs) {
    for (const auto& s : t.steps) steps.push_back(&s);
  }
  return steps;
}

Vec flatten_and_normalize(const std::vector<Trajectory>& trajs,
                          const std::vector<Vec>& advantages) {
  Vec flat;
  for (const auto& a : advantages) flat.insert(flat.end(), a.begin(), a.end());
  double mean = 0.0;
  for (double v : flat) mean += v;
  mean /= flat.empty() ? 1.0 : double(flat.size());
  double var = 0.0;
  for (double v : flat) var += (v - mean) * (v - mean);
  var /= flat.empty() ? 1.0 : double(flat.size());
  const double scale = 1.0 / (std::sqrt(var) + 1e-8);
  for (double& v : flat) v = (v - mean) * scale;
  (void)trajs;
  return flat;
}

struct PolicyGradAccum {
  MlpGrads net;
  Vec log_std;
  explicit PolicyGradAccum(const GaussianMlpPolicy& p)
      : net(zeros_like(p.net)), log_std(p.log_std.size(), 0.0) {}
  Vec flat() const {
    Vec f;
    flatten(net, f);
    f.insert(f.end(), log_std.begin(), log_std.end());
    return f;
  }
};

}  // namespace

namespace detail {

double surrogate_value(const GaussianMlpPolicy& policy,
                       const std::vector<const TimeStep*>& steps,
                       const Vec& advantages) {
  double acc = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const DiagGaussian head{mlp_forward(policy.net, steps[i]->obs), policy.log_std};
    const double lp = gaussian_log_prob(head, steps[i]->action);
    acc += std::exp(lp - steps[i]->log_prob) * advantages[i];
  }
  return acc / double(steps.size());
}

Vec surrogate_gradient(const GaussianMlpPolicy& policy,
                       const std::vector<const TimeStep*>& steps,
                       const Vec& advantages) {
  PolicyGradAccum acc(policy);
  FwdCache cache;
  Vec dmean, dlog_std;
  const double inv = 1.0 / double(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    mlp_forward_cached(policy.net, steps[i]->obs, cache);
    const DiagGaussian head{cache.output(), policy.log_std};
    const double lp = gaussian_log_prob(head, steps[i]->action);
    const double ratio = std::exp(lp - steps[i]->log_prob);
    gaussian_log_prob_grad(head, steps[i]->action, dmean, dlog_std);
    const double w = ratio * advantages[i] * inv;
    kern::scale(w, dmean.data(), dmean.size());
    mlp_backward(policy.net, cache, dmean, acc.net);
    kern::axpy(w, dlog_std.data(), acc.log_std.data(), dlog_std.size());
  }
  return acc.flat();
}

Vec kl_gradient(const GaussianMlpPolicy& old_policy,
                const GaussianMlpPolicy& new_policy,
                const std::vector<const TimeStep*>& steps) {
  PolicyGradAccum acc(new_policy);
  FwdCache cache;
  Vec dmean, dlog_std;
  const double inv = 1.0 / double(steps.size());
  for (const TimeStep* s : steps) {
    const DiagGaussian p{mlp_forward(old_policy.net, s->obs), old_policy.log_std};
    mlp_forward_cached(new_policy.net, s->obs, cache);
    const DiagGaussian q{cache.output(), new_policy.log_std};
    gaussian_kl_grad_q(p, q, dmean, dlog_std);
    kern::scale(inv, dmean.data(), dmean.size());
    mlp_backward(new_policy.net, cache, dmean, acc.net);
    kern::axpy(inv, dlog_std.data(), acc.log_std.data(), dlog_std.size());
  }
  return acc.flat();
}

double mean_kl(const GaussianMlpPolicy& old_policy,
               const GaussianMlpPolicy& new_policy,
               const std::vector<const TimeStep*>& steps) {
  double acc = 0.0;
  for (const TimeStep* s : steps) {
    const DiagGaussian p{mlp_forward(old_policy.net, s->obs), old_policy.log_std};
    const DiagGaussian q{mlp_forward(new_policy.net, s->obs), new_policy.log_std};
    acc += gaussian_kl(p, q);
  }
  return acc / double(steps.size());
}

// Fisher-vector product for the diagonal Gaussian head evaluated at the
// current parameters: F v = E[ J_mu^T diag(1/sigma^2) J_mu v ] for the net
// block plus 2 v for the log-std block. J_mu v comes from a forward-mode
// pass, the transpose from reverse mode.
Vec fisher_vector_product(const GaussianMlpPolicy& policy,
                          const std::vector<const TimeStep*>& steps,
                          const Vec& vec, int stride, double damping) {
  const std::size_t net_params = policy.net.param_count();
  MlpGrads tangent = zeros_like(policy.net);
  Vec net_part(vec.begin(), vec.begin() + std::ptrdiff_t(net_params));
  unflatten(net_part, tangent);

  PolicyGradAccum acc(policy);
  FwdCache cache;
  Vec inv_var(policy.log_std.size());
  for (std::size_t i = 0; i < inv_var.size(); ++i) {
    inv_var[i] = std::exp(-2.0 * policy.log_std[i]);
  }
  std::size_t used = 0;
  for (std::size_t i = 0; i < steps.size(); i += std::size_t(std::max(1, stride))) {
    mlp_forward_cached(policy.net, steps[i]->obs, cache);
    Vec jv = mlp_jvp(policy.net, cache, tangent);
    for (std::size_t d = 0; d < jv.size(); ++d) jv[d] *= inv_var[d];
    mlp_backward(policy.net, cache, jv, acc.net);
    ++used;
  }
  Vec out = acc.flat();
  const double inv = 1.0 / double(std::max<std::size_t>(1, used));
  kern::scale(inv, out.data(), net_params);
  // log-std block: Fisher is exactly 2 per dimension.
  for (std::size_t i = 0; i < policy.log_std.size(); ++i) {
    out[net_params + i] = 2.0 * vec[net_params + i];
  }
  kern::axpy(damping, vec.data(), out.data(), out.size());
  return out;
}

}  // namespace detail

TrpoResult trpo_update(GaussianMlpPolicy& policy,
                       const std::vector<Trajectory>& trajectories,
                       const std::vector<Vec>& advantages,
                       const RlConfig& config) {
  TrpoResult result;
  if (trajectories.empty()) {
    throw std::invalid_argument("trpo_update: no trajectories");
  }
  const auto steps = flatten_steps(trajectories);
  const Vec adv = flatten_and_normalize(trajectories, advantages);

  const Vec theta_old = policy.flat_params();
  const GaussianMlpPolicy old_policy = policy;

  const Vec g = detail::surrogate_gradient(policy, steps, adv);
  if (!all_finite(g)) {
    std::fprintf(stderr, "[trpo] non-finite policy gradient, skipping update\n");
    result.note = "non-finite gradient";
    return result;
  }
  double gnorm = norm(g);
  if (gnorm < 1e-12) {
    result.note = "zero gradient";
    return result;
  }

  // Conjugate gradient on F x = g.
  auto fvp = [&](const Vec& v) {
    return detail::fisher_vector_product(policy, steps, v, config.fvp_stride,
                                         config.cg_damping);
  };
  Vec x(g.size(), 0.0);
  Vec r = g;
  Vec p = g;
  double rs = kern::dot(r.data(), r.data(), r.size());
  for (int it = 0; it < config.cg_iterations && rs > 1e-18; ++it) {
    const Vec fp = fvp(p);
    const double alpha = rs / kern::dot(p.data(), fp.data(), p.size());
    kern::axpy(alpha, p.data(), x.data(), x.size());
    kern::axpy(-alpha, fp.data(), r.data(), r.size());
    const double rs_new = kern::dot(r.data(), r.data(), r.size());
    const double beta = rs_new / rs;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    rs = rs_new;
  }

  const Vec fx = fvp(x);
  const double xhx = kern::dot(x.data(), fx.data(), x.size());
  if (!(xhx > 0.0) || !all_finite(x)) {
    std::fprintf(stderr, "[trpo] degenerate natural gradient, skipping update\n");
    result.note = "degenerate step";
    return result;
  }
  const double beta_step = std::sqrt(2.0 * config.kl_delta / xhx);

  result.surrogate_before = detail::surrogate_value(old_policy, steps, adv);

  double alpha = 1.0;
  Vec theta(theta_old.size());
  for (int j = 0; j <= config.max_backtracks; ++j, alpha *= config.backtrack_factor) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] = theta_old[i] + alpha * beta_step * x[i];
    }
    policy.set_flat_params(theta);
    const double surr = detail::surrogate_value(policy, steps, adv);
    const double kl = detail::mean_kl(old_policy, policy, steps);
    if (std::isfinite(surr) && std::isfinite(kl) &&
        surr >= result.surrogate_before - 1e-12 &&
        kl <= 1.5 * config.kl_delta) {
      result.accepted = true;
      result.mean_kl = kl;
      result.surrogate_after = surr;
      result.backtracks = j;
      return result;
    }
  }
  policy.set_flat_params(theta_old);
  result.note = "line search failed";
  result.backtracks = config.max_backtracks + 1;
  return result;
}

void fit_value_net(Mlp& value_net, Adam& adam, const std::vector<Vec>& inputs,
                   const Vec& targets, int passes, int minibatch, Rng& rng) {
  if (inputs.empty()) return;
  Vec params;
  flatten(value_net, params);
  MlpGrads grads = zeros_like(value_net);
  Vec grad_flat(params.size());
  FwdCache cache;
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  const Vec dout(1, 0.0);
  for (int pass = 0; pass < passes; ++pass) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += std::size_t(minibatch)) {
      const std::size_t end = std::min(order.size(), start + std::size_t(minibatch));
      grads.set_zero();
      Vec d(1);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        mlp_forward_cached(value_net, inputs[i], cache);
        d[0] = 2.0 * (cache.output()[0] - targets[i]) / double(end - start);
        mlp_backward(value_net, cache, d, grads);
      }
      flatten(grads, grad_flat);
      adam.step(params, grad_flat);
      unflatten(params, value_net);
    }
  }
}

PolicyUpdateStats update_policy(GaussianMlpPolicy& policy, Mlp& value_net,
                                Adam& value_adam, const std::vector<Vec>& goals,
                                const EnvConfig& env, const RlConfig& config,
                                const RolloutOptions& options,
                                EpisodeSeeder& seeder, Rng& value_rng) {
  if (goals.empty()) {
    throw std::invalid_argument("update_policy: empty goal list");
  }
  config.validate();
  PolicyUpdateStats stats;
  std::size_t successes = 0, episodes = 0;
  for (int inner = 0; inner < config.inner_iterations; ++inner) {
    const auto trajs =
        collect_rollouts(policy, &value_net, goals, config.episodes_per_iteration,
                         env, options, seeder, config.rollout_workers);
    merge_success_fractions(stats.table, trajs);
    std::vector<Vec> advs;
    std::vector<Vec> obs;
    Vec targets;
    advs.reserve(trajs.size());
    for (const auto& t : trajs) {
      GaeResult g = compute_gae(t, config.gamma, config.gae_lambda);
      for (std::size_t i = 0; i < t.steps.size(); ++i) {
        obs.push_back(t.steps[i].obs);
        targets.push_back(g.value_targets[i]);
      }
      advs.push_back(std::move(g.advantages));
      stats.env_steps += t.steps.size();
      successes += t.success ? 1 : 0;
      ++episodes;
    }
    stats.trpo_steps.push_back(trpo_update(policy, trajs, advs, config));
    fit_value_net(value_net, value_adam, obs, targets, config.value_fit_passes,
                  config.value_minibatch, value_rng);
  }
  stats.mean_success = episodes ? double(successes) / double(episodes) : 0.0;
  return stats;
}

}  // namespace goalgen
