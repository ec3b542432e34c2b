#pragma once

#include <functional>
#include <string>
#include <vector>

#include "goalgen/rng.hpp"
#include "goalgen/tensor.hpp"

namespace goalgen {

struct GradCheckReport {
  std::string name;
  int configs = 0;
  double max_rel_err = 0.0;
  bool pass = false;
};

// Central finite differences on a random subset of coordinates per
// configuration. rel_err = |fd - analytic| / max(|fd|, |analytic|), with
// components below `floor` on both sides treated as matching.
struct GradCheckParams {
  int configs = 100;
  int coords_per_config = 24;
  double step = 1e-6;
  double tolerance = 1e-4;
  double floor = 1e-8;
};

using LossFn = std::function<double(const Vec&)>;
using GradFn = std::function<Vec(const Vec&)>;

// `make_instance` builds a fresh random configuration and returns its
// parameter vector; loss/grad evaluate that configuration at given params.
GradCheckReport check_gradient(
    const std::string& name,
    const std::function<Vec(Rng&, LossFn&, GradFn&)>& make_instance,
    const GradCheckParams& params, Rng& rng);

// The full suite: mlp forward/backward on the three stock architectures,
// policy surrogate, value regression, generator and discriminator losses.
std::vector<GradCheckReport> run_gradient_suite(const GradCheckParams& params,
                                                std::uint64_t seed);

}  // namespace goalgen
