#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "goalgen/gaussian.hpp"
#include "goalgen/gradcheck.hpp"
#include "goalgen/mlp.hpp"
#include "goalgen/rng.hpp"
#include "goalgen/tensor_io.hpp"

using namespace goalgen;

namespace {

// Independent forward pass used as the oracle: plain nested loops, no shared
// code with the kernels.
Vec naive_forward(const Mlp& net, const Vec& input) {
  Vec cur = input;
  for (const auto& layer : net.layers) {
    Vec next(layer.w.rows);
    for (std::size_t r = 0; r < layer.w.rows; ++r) {
      double acc = layer.b[r];
      for (std::size_t c = 0; c < layer.w.cols; ++c) {
        acc += layer.w(r, c) * cur[c];
      }
      next[r] = acc;
    }
    if (layer.act == Act::tanh) {
      for (auto& v : next) v = std::tanh(v);
    } else if (layer.act == Act::relu) {
      for (auto& v : next) v = v > 0 ? v : 0;
    }
    cur = next;
  }
  return cur;
}

}  // namespace

TEST_CASE("all-zero parameters map any input to zero") {
  Mlp net = make_mlp(4, {8, 8}, 3, Act::tanh, 1);
  for (auto& l : net.layers) {
    l.w.set_zero();
    l.b.assign(l.b.size(), 0.0);
  }
  Rng rng(2);
  const Vec out = mlp_forward(net, normal_vec(rng, 4));
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("single linear identity layer passes input through") {
  Mlp net;
  Layer l;
  l.w = Mat(3, 3);
  for (int i = 0; i < 3; ++i) l.w(i, i) = 1.0;
  l.b.assign(3, 0.0);
  l.act = Act::linear;
  net.layers.push_back(l);
  const Vec x = {0.5, -2.0, 3.25};
  CHECK(mlp_forward(net, x) == x);
}

TEST_CASE("2x32 tanh forward matches the independent oracle") {
  Rng rng(99);
  const Mlp net = make_mlp(6, {32, 32}, 2, Act::tanh, 12345);
  for (int i = 0; i < 20; ++i) {
    const Vec x = normal_vec(rng, 6);
    const Vec a = mlp_forward(net, x);
    const Vec b = naive_forward(net, x);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("shape mismatch is rejected") {
  const Mlp net = make_mlp(4, {8}, 2, Act::tanh, 1);
  CHECK_THROWS_AS(mlp_forward(net, Vec(5, 0.0)), std::invalid_argument);
}

TEST_CASE("zero output gradient yields zero parameter gradients") {
  const Mlp net = make_mlp(4, {8}, 2, Act::tanh, 3);
  FwdCache cache;
  Rng rng(4);
  mlp_forward_cached(net, normal_vec(rng, 4), cache);
  MlpGrads grads = zeros_like(net);
  mlp_backward(net, cache, Vec(2, 0.0), grads);
  Vec flat;
  flatten(grads, flat);
  for (double v : flat) CHECK(v == 0.0);
}

TEST_CASE("linear 1->1 layer: dy/dw = x, dy/db = 1") {
  Mlp net;
  Layer l;
  l.w = Mat(1, 1);
  l.w(0, 0) = 0.7;
  l.b = {0.1};
  l.act = Act::linear;
  net.layers.push_back(l);
  FwdCache cache;
  mlp_forward_cached(net, {2.5}, cache);
  MlpGrads grads = zeros_like(net);
  mlp_backward(net, cache, {1.0}, grads);
  CHECK(grads.w[0](0, 0) == doctest::Approx(2.5));
  CHECK(grads.b[0][0] == doctest::Approx(1.0));
}

TEST_CASE("gradient checks pass on every architecture used in the project") {
  GradCheckParams params;
  params.configs = 12;  // the acceptance suite runs the full 100
  const auto reports = run_gradient_suite(params, 77);
  for (const auto& r : reports) {
    INFO(r.name, " max rel err ", r.max_rel_err);
    CHECK(r.pass);
  }
}

TEST_CASE("jvp matches finite-difference directional derivatives") {
  Rng rng(5);
  const Mlp net = make_mlp(5, {16, 16}, 3, Act::tanh, 55);
  Vec theta;
  flatten(net, theta);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = normal_vec(rng, 5);
    const Vec dir = normal_vec(rng, theta.size());
    MlpGrads tangent = zeros_like(net);
    unflatten(dir, tangent);
    FwdCache cache;
    mlp_forward_cached(net, x, cache);
    const Vec jv = mlp_jvp(net, cache, tangent);

    const double h = 1e-6;
    Mlp plus = net, minus = net;
    Vec tp = theta, tm = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      tp[i] += h * dir[i];
      tm[i] -= h * dir[i];
    }
    unflatten(tp, plus);
    unflatten(tm, minus);
    const Vec yp = mlp_forward(plus, x);
    const Vec ym = mlp_forward(minus, x);
    for (std::size_t k = 0; k < jv.size(); ++k) {
      const double fd = (yp[k] - ym[k]) / (2.0 * h);
      CHECK(jv[k] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("gaussian closed forms") {
  DiagGaussian p{{0.0}, {0.0}};
  SUBCASE("KL(p||p) = 0") { CHECK(gaussian_kl(p, p) == doctest::Approx(0.0)); }
  SUBCASE("log prob of the mean with unit std") {
    CHECK(gaussian_log_prob(p, {0.0}) ==
          doctest::Approx(-0.5 * std::log(2.0 * 3.14159265358979323846)));
  }
  SUBCASE("KL(N(0,1) || N(1,1)) = 0.5") {
    DiagGaussian q{{1.0}, {0.0}};
    CHECK(gaussian_kl(p, q) == doctest::Approx(0.5));
  }
}

TEST_CASE("KL is non-negative across random head pairs") {
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    DiagGaussian p{normal_vec(rng, 3), normal_vec(rng, 3, 0.5)};
    DiagGaussian q{normal_vec(rng, 3), normal_vec(rng, 3, 0.5)};
    CHECK(gaussian_kl(p, q) >= -1e-12);
  }
}

TEST_CASE("gaussian gradient helpers match finite differences") {
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    DiagGaussian d{normal_vec(rng, 2), normal_vec(rng, 2, 0.4)};
    const Vec a = normal_vec(rng, 2);
    Vec dmean, dls;
    gaussian_log_prob_grad(d, a, dmean, dls);
    const double h = 1e-6;
    for (std::size_t k = 0; k < 2; ++k) {
      DiagGaussian dp = d, dm = d;
      dp.mean[k] += h;
      dm.mean[k] -= h;
      CHECK(dmean[k] == doctest::Approx((gaussian_log_prob(dp, a) -
                                         gaussian_log_prob(dm, a)) /
                                        (2 * h)).epsilon(1e-5));
      dp = d;
      dm = d;
      dp.log_std[k] += h;
      dm.log_std[k] -= h;
      CHECK(dls[k] == doctest::Approx((gaussian_log_prob(dp, a) -
                                       gaussian_log_prob(dm, a)) /
                                      (2 * h)).epsilon(1e-5));
    }

    DiagGaussian q{normal_vec(rng, 2), normal_vec(rng, 2, 0.4)};
    Vec dmq, dlsq;
    gaussian_kl_grad_q(d, q, dmq, dlsq);
    for (std::size_t k = 0; k < 2; ++k) {
      DiagGaussian qp = q, qm = q;
      qp.mean[k] += h;
      qm.mean[k] -= h;
      CHECK(dmq[k] == doctest::Approx((gaussian_kl(d, qp) - gaussian_kl(d, qm)) /
                                      (2 * h)).epsilon(1e-5));
      qp = q;
      qm = q;
      qp.log_std[k] += h;
      qm.log_std[k] -= h;
      CHECK(dlsq[k] == doctest::Approx((gaussian_kl(d, qp) - gaussian_kl(d, qm)) /
                                       (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("sampling uses the caller-provided stream deterministically") {
  DiagGaussian d{{0.0, 1.0}, {0.0, -0.5}};
  Rng a(42), b(42);
  CHECK(gaussian_sample(d, a) == gaussian_sample(d, b));
}

TEST_CASE("tensor file round-trip is bit-exact") {
  const auto path = std::filesystem::temp_directory_path() / "goalgen_nn_ckpt.bin";
  Mlp net = make_mlp(6, {32, 32}, 2, Act::tanh, 31);
  // Denormals and exact-representability stress values.
  net.layers[0].w(0, 0) = 1.0 / 3.0;
  net.layers[0].w(0, 1) = 5e-324;
  net.layers[1].b[3] = -0.0;
  TensorFile tf;
  put_mlp(tf, "policy", net);
  tf.put("policy/log_std", Vec{std::log(0.7), -1.25});
  save_tensors(tf, path.string());
  const TensorFile back = load_tensors(path.string());
  const Mlp net2 = get_mlp(back, "policy");
  REQUIRE(net2.layers.size() == net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    CHECK(net2.layers[l].w.data == net.layers[l].w.data);
    CHECK(net2.layers[l].b == net.layers[l].b);
    CHECK(net2.layers[l].act == net.layers[l].act);
  }
  CHECK(back.vec("policy/log_std") == Vec{std::log(0.7), -1.25});
  std::filesystem::remove(path);
}

TEST_CASE("initialization is deterministic per seed and scales the last layer") {
  const Mlp a = make_mlp(6, {32, 32}, 2, Act::tanh, 7, 0.01);
  const Mlp b = make_mlp(6, {32, 32}, 2, Act::tanh, 7, 0.01);
  const Mlp c = make_mlp(6, {32, 32}, 2, Act::tanh, 8, 0.01);
  CHECK(a.layers[0].w.data == b.layers[0].w.data);
  CHECK(a.layers[0].w.data != c.layers[0].w.data);
  double max_last = 0.0;
  for (double v : a.layers.back().w.data) max_last = std::max(max_last, std::abs(v));
  CHECK(max_last < 0.01);
}

TEST_CASE("adam descends a quadratic") {
  Adam adam;
  adam.lr = 0.05;
  Vec x = {5.0, -3.0};
  for (int i = 0; i < 500; ++i) {
    Vec g = {2 * x[0], 2 * x[1]};
    adam.step(x, g);
  }
  CHECK(std::abs(x[0]) < 0.05);
  CHECK(std::abs(x[1]) < 0.05);
}
