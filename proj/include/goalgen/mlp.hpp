#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "goalgen/tensor.hpp"

namespace goalgen {

enum class Act { linear, tanh, relu };

struct Layer {
  Mat w;   // out x in, row-major
  Vec b;   // out
  Act act = Act::linear;
};

// Plain feed-forward network. All arithmetic is double precision; gradients
// are exact reverse-mode and are checked against finite differences in the
// test suite.
struct Mlp {
  std::vector<Layer> layers;

  std::size_t in_dim() const { return layers.front().w.cols; }
  std::size_t out_dim() const { return layers.back().w.rows; }
  std::size_t param_count() const;
};

// Gradient / tangent container with the same shapes as an Mlp.
struct MlpGrads {
  std::vector<Mat> w;
  std::vector<Vec> b;

  void set_zero();
  std::size_t param_count() const;
};

MlpGrads zeros_like(const Mlp& net);

// Hidden layers use `hidden_act`; the output layer is linear. Weights are
// fan-in/fan-out scaled uniform; `out_scale` rescales the final layer (the
// policy uses 0.01 so initial actions are near zero).
Mlp make_mlp(std::size_t in, const std::vector<std::size_t>& hidden,
             std::size_t out, Act hidden_act, std::uint64_t seed,
             double out_scale = 1.0);

Vec mlp_forward(const Mlp& net, const Vec& input);

// Per-layer activations kept for the backward/JVP passes.
// post[0] is the input, post[l+1] the output of layer l.
struct FwdCache {
  std::vector<Vec> pre;
  std::vector<Vec> post;
  const Vec& output() const { return post.back(); }
};

void mlp_forward_cached(const Mlp& net, const Vec& input, FwdCache& cache);

// Accumulates d(output . output_grad)/d(params) into `grads` and, when
// `input_grad` is non-null, writes d(...)/d(input) there.
void mlp_backward(const Mlp& net, const FwdCache& cache, const Vec& output_grad,
                  MlpGrads& grads, Vec* input_grad = nullptr);

// Forward-mode directional derivative: the tangent of the output when the
// parameters move along `tangent` (input held fixed). Needs the cache of a
// previous forward pass at the same input.
Vec mlp_jvp(const Mlp& net, const FwdCache& cache, const MlpGrads& tangent);

// Flat parameter vector layout: layer0.w row-major, layer0.b, layer1.w, ...
void flatten(const Mlp& net, Vec& out);
void unflatten(const Vec& flat, Mlp& net);
void flatten(const MlpGrads& grads, Vec& out);
void unflatten(const Vec& flat, MlpGrads& grads);

struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  Vec m, v;

  // Gradient-descent step on `params` (minimization).
  void step(Vec& params, const Vec& grad);
};

}  // namespace goalgen
