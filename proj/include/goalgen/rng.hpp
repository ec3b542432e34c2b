#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace goalgen {

using Rng = std::mt19937_64;

// One master seed fans out into independent named streams (env, policy-init,
// gan-init, rollout, gan-noise, eval, ...) so toggling one component does not
// shift another's randomness.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view name) {
  return splitmix64(base ^ fnv1a64(name));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base + 0x9e3779b97f4a7c15ULL * (index + 1));
}

struct SeedBank {
  std::uint64_t master = 0;
  std::uint64_t stream_seed(std::string_view name) const {
    return derive_seed(master, name);
  }
  Rng stream(std::string_view name) const { return Rng(stream_seed(name)); }
};

inline double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

inline double normal(Rng& rng, double mean = 0.0, double stddev = 1.0) {
  std::normal_distribution<double> d(mean, stddev);
  return d(rng);
}

inline std::vector<double> normal_vec(Rng& rng, std::size_t n,
                                      double stddev = 1.0) {
  std::normal_distribution<double> d(0.0, stddev);
  std::vector<double> out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

}  // namespace goalgen
