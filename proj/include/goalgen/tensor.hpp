#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace goalgen {

using Vec = std::vector<double>;

// Dense row-major matrix.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return data.size(); }
  void set_zero() { data.assign(data.size(), 0.0); }
};

inline double squared_distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double euclidean(const Vec& a, const Vec& b) {
  return std::sqrt(squared_distance(a, b));
}

inline double norm(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

inline bool all_finite(const Vec& a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace goalgen
