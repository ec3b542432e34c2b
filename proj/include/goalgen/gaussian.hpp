#pragma once

#include "goalgen/rng.hpp"
#include "goalgen/tensor.hpp"

namespace goalgen {

// Diagonal Gaussian over actions: mean from the policy net, log-std a free
// per-dimension parameter.
struct DiagGaussian {
  Vec mean;
  Vec log_std;
};

double gaussian_log_prob(const DiagGaussian& d, const Vec& action);
Vec gaussian_sample(const DiagGaussian& d, Rng& rng);
// KL(p || q); both heads must share the dimension.
double gaussian_kl(const DiagGaussian& p, const DiagGaussian& q);
double gaussian_entropy(const DiagGaussian& d);

// d log N(action; mean, std) / d mean and / d log_std.
void gaussian_log_prob_grad(const DiagGaussian& d, const Vec& action,
                            Vec& dmean, Vec& dlog_std);
// d KL(p || q) / d q.mean and / d q.log_std (p fixed).
void gaussian_kl_grad_q(const DiagGaussian& p, const DiagGaussian& q,
                        Vec& dmean_q, Vec& dlog_std_q);

}  // namespace goalgen
