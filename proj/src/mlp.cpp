#include "goalgen/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "goalgen/kernels.hpp"
#include "goalgen/rng.hpp"

namespace goalgen {

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.w.size() + l.b.size();
  return n;
}

void MlpGrads::set_zero() {
  for (auto& m : w) m.set_zero();
  for (auto& v : b) v.assign(v.size(), 0.0);
}

std::size_t MlpGrads::param_count() const {
  std::size_t n = 0;
  for (const auto& m : w) n += m.size();
  for (const auto& v : b) n += v.size();
  return n;
}

MlpGrads zeros_like(const Mlp& net) {
  MlpGrads g;
  g.w.reserve(net.layers.size());
  g.b.reserve(net.layers.size());
  for (const auto& l : net.layers) {
    g.w.emplace_back(l.w.rows, l.w.cols);
    g.b.emplace_back(l.b.size(), 0.0);
  }
  return g;
}

Mlp make_mlp(std::size_t in, const std::vector<std::size_t>& hidden,
             std::size_t out, Act hidden_act, std::uint64_t seed,
             double out_scale) {
  Mlp net;
  Rng rng(seed);
  std::vector<std::size_t> dims;
  dims.push_back(in);
  for (auto h : hidden) dims.push_back(h);
  dims.push_back(out);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.w = Mat(dims[l + 1], dims[l]);
    layer.b.assign(dims[l + 1], 0.0);
    const bool last = (l + 2 == dims.size());
    layer.act = last ? Act::linear : hidden_act;
    const double limit = std::sqrt(6.0 / double(dims[l] + dims[l + 1]));
    const double s = last ? out_scale : 1.0;
    for (auto& v : layer.w.data) v = s * uniform(rng, -limit, limit);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

namespace {

void apply_activation(Act act, Vec& x) {
  switch (act) {
    case Act::linear:
      break;
    case Act::tanh:
      kern::tanh_forward(x.data(), x.size());
      break;
    case Act::relu:
      kern::relu(x.data(), x.size());
      break;
  }
}

}  // namespace

Vec mlp_forward(const Mlp& net, const Vec& input) {
  if (input.size() != net.in_dim()) {
    throw std::invalid_argument("mlp_forward: input length " +
                                std::to_string(input.size()) +
                                " does not match first layer width " +
                                std::to_string(net.in_dim()));
  }
  Vec cur = input;
  Vec next;
  for (const auto& l : net.layers) {
    next.resize(l.w.rows);
    kern::matvec(l.w.data.data(), l.w.rows, l.w.cols, cur.data(), l.b.data(),
                 next.data());
    apply_activation(l.act, next);
    cur.swap(next);
  }
  return cur;
}

void mlp_forward_cached(const Mlp& net, const Vec& input, FwdCache& cache) {
  if (input.size() != net.in_dim()) {
    throw std::invalid_argument("mlp_forward_cached: input length mismatch");
  }
  const std::size_t L = net.layers.size();
  cache.pre.resize(L);
  cache.post.resize(L + 1);
  cache.post[0] = input;
  for (std::size_t l = 0; l < L; ++l) {
    const Layer& layer = net.layers[l];
    Vec& pre = cache.pre[l];
    pre.resize(layer.w.rows);
    kern::matvec(layer.w.data.data(), layer.w.rows, layer.w.cols,
                 cache.post[l].data(), layer.b.data(), pre.data());
    cache.post[l + 1] = pre;
    apply_activation(layer.act, cache.post[l + 1]);
  }
}

void mlp_backward(const Mlp& net, const FwdCache& cache, const Vec& output_grad,
                  MlpGrads& grads, Vec* input_grad) {
  const std::size_t L = net.layers.size();
  Vec delta = output_grad;  // gradient wrt layer output, walked backwards
  Vec dpre, dprev;
  for (std::size_t li = L; li-- > 0;) {
    const Layer& layer = net.layers[li];
    dpre.resize(delta.size());
    switch (layer.act) {
      case Act::linear:
        dpre = delta;
        break;
      case Act::tanh:
        kern::tanh_backward(cache.post[li + 1].data(), delta.data(),
                            dpre.data(), delta.size());
        break;
      case Act::relu:
        kern::relu_backward(cache.pre[li].data(), delta.data(), dpre.data(),
                            delta.size());
        break;
    }
    kern::rank1_update(grads.w[li].data.data(), layer.w.rows, layer.w.cols,
                       dpre.data(), cache.post[li].data(), 1.0);
    kern::axpy(1.0, dpre.data(), grads.b[li].data(), dpre.size());
    if (li > 0 || input_grad) {
      dprev.resize(layer.w.cols);
      kern::matvec_t(layer.w.data.data(), layer.w.rows, layer.w.cols,
                     dpre.data(), dprev.data());
      delta.swap(dprev);
    }
  }
  if (input_grad) *input_grad = delta;
}

Vec mlp_jvp(const Mlp& net, const FwdCache& cache, const MlpGrads& tangent) {
  const std::size_t L = net.layers.size();
  Vec t(net.in_dim(), 0.0);  // input tangent is zero
  Vec u;
  for (std::size_t l = 0; l < L; ++l) {
    const Layer& layer = net.layers[l];
    u.resize(layer.w.rows);
    // u = dW x + W t + db
    kern::matvec(tangent.w[l].data.data(), layer.w.rows, layer.w.cols,
                 cache.post[l].data(), tangent.b[l].data(), u.data());
    if (l > 0) {
      for (std::size_t r = 0; r < layer.w.rows; ++r) {
        u[r] += kern::dot(layer.w.row(r), t.data(), layer.w.cols);
      }
    }
    switch (layer.act) {
      case Act::linear:
        break;
      case Act::tanh:
        kern::tanh_backward(cache.post[l + 1].data(), u.data(), u.data(),
                            u.size());
        break;
      case Act::relu:
        kern::relu_backward(cache.pre[l].data(), u.data(), u.data(), u.size());
        break;
    }
    t.swap(u);
  }
  return t;
}

void flatten(const Mlp& net, Vec& out) {
  out.resize(net.param_count());
  std::size_t k = 0;
  for (const auto& l : net.layers) {
    for (double v : l.w.data) out[k++] = v;
    for (double v : l.b) out[k++] = v;
  }
}

void unflatten(const Vec& flat, Mlp& net) {
  if (flat.size() != net.param_count()) {
    throw std::invalid_argument("unflatten: size mismatch");
  }
  std::size_t k = 0;
  for (auto& l : net.layers) {
    for (double& v : l.w.data) v = flat[k++];
    for (double& v : l.b) v = flat[k++];
  }
}

void flatten(const MlpGrads& grads, Vec& out) {
  out.resize(grads.param_count());
  std::size_t k = 0;
  for (std::size_t l = 0; l < grads.w.size(); ++l) {
    for (double v : grads.w[l].data) out[k++] = v;
    for (double v : grads.b[l]) out[k++] = v;
  }
}

void unflatten(const Vec& flat, MlpGrads& grads) {
  if (flat.size() != grads.param_count()) {
    throw std::invalid_argument("unflatten: size mismatch");
  }
  std::size_t k = 0;
  for (std::size_t l = 0; l < grads.w.size(); ++l) {
    for (double& v : grads.w[l].data) v = flat[k++];
    for (double& v : grads.b[l]) v = flat[k++];
  }
}

void Adam::step(Vec& params, const Vec& grad) {
  if (m.size() != params.size()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
    t = 0;
  }
  ++t;
  const double c1 = 1.0 - std::pow(beta1, double(t));
  const double c2 = 1.0 - std::pow(beta2, double(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
  }
}

}  // namespace goalgen
