#include "goalgen/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace goalgen {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // ln(2*pi)
}

double gaussian_log_prob(const DiagGaussian& d, const Vec& action) {
  double lp = 0.0;
  for (std::size_t i = 0; i < d.mean.size(); ++i) {
    const double std = std::exp(d.log_std[i]);
    const double z = (action[i] - d.mean[i]) / std;
    lp += -0.5 * z * z - d.log_std[i] - 0.5 * kLog2Pi;
  }
  return lp;
}

Vec gaussian_sample(const DiagGaussian& d, Rng& rng) {
  Vec out(d.mean.size());
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = d.mean[i] + std::exp(d.log_std[i]) * n(rng);
  }
  return out;
}

double gaussian_kl(const DiagGaussian& p, const DiagGaussian& q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.mean.size(); ++i) {
    const double vp = std::exp(2.0 * p.log_std[i]);
    const double vq = std::exp(2.0 * q.log_std[i]);
    const double dm = p.mean[i] - q.mean[i];
    kl += q.log_std[i] - p.log_std[i] + (vp + dm * dm) / (2.0 * vq) - 0.5;
  }
  return kl;
}

double gaussian_entropy(const DiagGaussian& d) {
  double h = 0.0;
  for (double ls : d.log_std) h += ls + 0.5 * (1.0 + kLog2Pi);
  return h;
}

void gaussian_log_prob_grad(const DiagGaussian& d, const Vec& action,
                            Vec& dmean, Vec& dlog_std) {
  const std::size_t n = d.mean.size();
  dmean.resize(n);
  dlog_std.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double var = std::exp(2.0 * d.log_std[i]);
    const double diff = action[i] - d.mean[i];
    dmean[i] = diff / var;
    dlog_std[i] = diff * diff / var - 1.0;
  }
}

void gaussian_kl_grad_q(const DiagGaussian& p, const DiagGaussian& q,
                        Vec& dmean_q, Vec& dlog_std_q) {
  const std::size_t n = p.mean.size();
  dmean_q.resize(n);
  dlog_std_q.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double vp = std::exp(2.0 * p.log_std[i]);
    const double vq = std::exp(2.0 * q.log_std[i]);
    const double dm = q.mean[i] - p.mean[i];
    dmean_q[i] = dm / vq;
    dlog_std_q[i] = 1.0 - (vp + dm * dm) / vq;
  }
}

}  // namespace goalgen
