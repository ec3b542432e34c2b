#include "goalgen/gradcheck.hpp"

#include <cmath>
#include <memory>

#include "goalgen/goal_gan.hpp"
#include "goalgen/mlp.hpp"
#include "goalgen/rollout.hpp"
#include "goalgen/trpo.hpp"

namespace goalgen {

GradCheckReport check_gradient(
    const std::string& name,
    const std::function<Vec(Rng&, LossFn&, GradFn&)>& make_instance,
    const GradCheckParams& params, Rng& rng) {
  GradCheckReport report;
  report.name = name;
  report.pass = true;
  for (int c = 0; c < params.configs; ++c) {
    LossFn loss;
    GradFn grad;
    Vec theta = make_instance(rng, loss, grad);
    const Vec analytic = grad(theta);
    std::uniform_int_distribution<std::size_t> pick(0, theta.size() - 1);
    for (int k = 0; k < params.coords_per_config; ++k) {
      const std::size_t i = pick(rng);
      const double h = params.step * std::max(1.0, std::abs(theta[i]));
      Vec plus = theta, minus = theta;
      plus[i] += h;
      minus[i] -= h;
      const double fd = (loss(plus) - loss(minus)) / (2.0 * h);
      const double denom = std::max(std::abs(fd), std::abs(analytic[i]));
      if (denom < params.floor) continue;
      const double rel = std::abs(fd - analytic[i]) / denom;
      report.max_rel_err = std::max(report.max_rel_err, rel);
      if (rel > params.tolerance) report.pass = false;
    }
    ++report.configs;
  }
  return report;
}

namespace {

struct ArchSpec {
  std::size_t in;
  std::vector<std::size_t> hidden;
  std::size_t out;
  Act act;
  const char* name;
};

// loss(theta) = output(theta, x) . w  for a random input x and weight w.
std::function<Vec(Rng&, LossFn&, GradFn&)> mlp_instance(const ArchSpec& arch) {
  return [arch](Rng& rng, LossFn& loss, GradFn& grad) -> Vec {
    auto net = std::make_shared<Mlp>(
        make_mlp(arch.in, arch.hidden, arch.out, arch.act, rng()));
    auto x = std::make_shared<Vec>(normal_vec(rng, arch.in));
    auto w = std::make_shared<Vec>(normal_vec(rng, arch.out));
    loss = [net, x, w](const Vec& theta) {
      Mlp m = *net;
      unflatten(theta, m);
      const Vec y = mlp_forward(m, *x);
      double acc = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) acc += y[i] * (*w)[i];
      return acc;
    };
    grad = [net, x, w](const Vec& theta) {
      Mlp m = *net;
      unflatten(theta, m);
      FwdCache cache;
      mlp_forward_cached(m, *x, cache);
      MlpGrads grads = zeros_like(m);
      mlp_backward(m, cache, *w, grads);
      Vec flat;
      flatten(grads, flat);
      return flat;
    };
    Vec theta;
    flatten(*net, theta);
    return theta;
  };
}

std::function<Vec(Rng&, LossFn&, GradFn&)> policy_surrogate_instance() {
  return [](Rng& rng, LossFn& loss, GradFn& grad) -> Vec {
    const std::size_t obs_dim = 8, act_dim = 2;
    auto policy = std::make_shared<GaussianMlpPolicy>();
    policy->net = make_mlp(obs_dim, {16, 16}, act_dim, Act::tanh, rng());
    policy->log_std = normal_vec(rng, act_dim, 0.3);
    auto steps = std::make_shared<std::vector<TimeStep>>();
    auto adv = std::make_shared<Vec>();
    for (int i = 0; i < 12; ++i) {
      TimeStep ts;
      ts.obs = normal_vec(rng, obs_dim);
      ts.action = normal_vec(rng, act_dim);
      ts.log_prob = uniform(rng, -3.0, -1.0);
      steps->push_back(std::move(ts));
      adv->push_back(normal(rng));
    }
    auto views = std::make_shared<std::vector<const TimeStep*>>();
    for (const auto& s : *steps) views->push_back(&s);
    loss = [policy, steps, views, adv](const Vec& theta) {
      GaussianMlpPolicy p = *policy;
      p.set_flat_params(theta);
      return detail::surrogate_value(p, *views, *adv);
    };
    grad = [policy, steps, views, adv](const Vec& theta) {
      GaussianMlpPolicy p = *policy;
      p.set_flat_params(theta);
      return detail::surrogate_gradient(p, *views, *adv);
    };
    return policy->flat_params();
  };
}

std::function<Vec(Rng&, LossFn&, GradFn&)> value_mse_instance() {
  return [](Rng& rng, LossFn& loss, GradFn& grad) -> Vec {
    const std::size_t obs_dim = 8;
    auto net = std::make_shared<Mlp>(make_mlp(obs_dim, {16, 16}, 1, Act::tanh, rng()));
    auto xs = std::make_shared<std::vector<Vec>>();
    auto ys = std::make_shared<Vec>();
    for (int i = 0; i < 16; ++i) {
      xs->push_back(normal_vec(rng, obs_dim));
      ys->push_back(normal(rng));
    }
    loss = [net, xs, ys](const Vec& theta) {
      Mlp m = *net;
      unflatten(theta, m);
      double acc = 0.0;
      for (std::size_t i = 0; i < xs->size(); ++i) {
        const double d = mlp_forward(m, (*xs)[i])[0] - (*ys)[i];
        acc += d * d;
      }
      return acc / double(xs->size());
    };
    grad = [net, xs, ys](const Vec& theta) {
      Mlp m = *net;
      unflatten(theta, m);
      MlpGrads grads = zeros_like(m);
      FwdCache cache;
      Vec d(1);
      for (std::size_t i = 0; i < xs->size(); ++i) {
        mlp_forward_cached(m, (*xs)[i], cache);
        d[0] = 2.0 * (cache.output()[0] - (*ys)[i]) / double(xs->size());
        mlp_backward(m, cache, d, grads);
      }
      Vec flat;
      flatten(grads, flat);
      return flat;
    };
    Vec theta;
    flatten(*net, theta);
    return theta;
  };
}

GanPair small_gan(Rng& rng, std::size_t goal_dim) {
  GanConfig cfg;
  cfg.generator_hidden = {128, 128};
  cfg.discriminator_hidden = {256, 256};
  return make_gan(cfg, goal_dim, rng());
}

std::function<Vec(Rng&, LossFn&, GradFn&)> discriminator_instance() {
  return [](Rng& rng, LossFn& loss, GradFn& grad) -> Vec {
    auto gan = std::make_shared<GanPair>(small_gan(rng, 2));
    auto labeled = std::make_shared<std::vector<LabeledGoal>>();
    auto generated = std::make_shared<std::vector<Vec>>();
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 6; ++i) {
      labeled->push_back(LabeledGoal{normal_vec(rng, 2, 2.0), 0.5, coin(rng) ? 1 : 0});
      generated->push_back(normal_vec(rng, 2, 2.0));
    }
    loss = [gan, labeled, generated](const Vec& theta) {
      GanPair g = *gan;
      unflatten(theta, g.discriminator);
      return discriminator_loss(g, *labeled, *generated);
    };
    grad = [gan, labeled, generated](const Vec& theta) {
      GanPair g = *gan;
      unflatten(theta, g.discriminator);
      MlpGrads grads = zeros_like(g.discriminator);
      discriminator_loss_grad(g, *labeled, *generated, grads);
      Vec flat;
      flatten(grads, flat);
      return flat;
    };
    Vec theta;
    flatten(gan->discriminator, theta);
    return theta;
  };
}

std::function<Vec(Rng&, LossFn&, GradFn&)> generator_instance() {
  return [](Rng& rng, LossFn& loss, GradFn& grad) -> Vec {
    auto gan = std::make_shared<GanPair>(small_gan(rng, 2));
    auto noise = std::make_shared<std::vector<Vec>>();
    for (int i = 0; i < 6; ++i) noise->push_back(normal_vec(rng, gan->noise_dim));
    loss = [gan, noise](const Vec& theta) {
      GanPair g = *gan;
      unflatten(theta, g.generator);
      return generator_loss(g, *noise);
    };
    grad = [gan, noise](const Vec& theta) {
      GanPair g = *gan;
      unflatten(theta, g.generator);
      MlpGrads grads = zeros_like(g.generator);
      generator_loss_grad(g, *noise, grads);
      Vec flat;
      flatten(grads, flat);
      return flat;
    };
    Vec theta;
    flatten(gan->generator, theta);
    return theta;
  };
}

}  // namespace

std::vector<GradCheckReport> run_gradient_suite(const GradCheckParams& params,
                                                std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradCheckReport> reports;
  const ArchSpec archs[] = {
      {10, {32, 32}, 2, Act::tanh, "mlp-policy-2x32-tanh"},
      {4, {128, 128}, 2, Act::relu, "mlp-generator-2x128-relu"},
      {2, {256, 256}, 1, Act::relu, "mlp-discriminator-2x256-relu"},
  };
  for (const auto& arch : archs) {
    reports.push_back(check_gradient(arch.name, mlp_instance(arch), params, rng));
  }
  reports.push_back(
      check_gradient("policy-surrogate", policy_surrogate_instance(), params, rng));
  reports.push_back(check_gradient("value-mse", value_mse_instance(), params, rng));
  reports.push_back(
      check_gradient("discriminator-loss", discriminator_instance(), params, rng));
  reports.push_back(
      check_gradient("generator-loss", generator_instance(), params, rng));
  return reports;
}

}  // namespace goalgen
