#include "goalgen/kernels.hpp"

#include <cmath>

namespace goalgen::kern {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matvec_scalar(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, const double* bias, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = bias ? bias[r] : 0.0;
    const double* row = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void matvec_t_scalar(const double* w, std::size_t rows, std::size_t cols,
                     const double* g, double* out) {
  for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) out[c] += gr * row[c];
  }
}

void rank1_scalar(double* w, std::size_t rows, std::size_t cols,
                  const double* g, const double* x, double alpha) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = w + r * cols;
    const double s = alpha * g[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += s * x[c];
  }
}

void relu_scalar(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_scalar(const double* pre, const double* upstream,
                          double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = pre[i] > 0.0 ? upstream[i] : 0.0;
}

void tanh_backward_scalar(const double* act, const double* upstream,
                          double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = upstream[i] * (1.0 - act[i] * act[i]);
}

}  // namespace

namespace detail {
const Ops& scalar_ops() {
  static const Ops ops = {
      dot_scalar,  axpy_scalar,         scale_scalar,
      matvec_scalar, matvec_t_scalar,   rank1_scalar,
      relu_scalar, relu_backward_scalar, tanh_backward_scalar,
  };
  return ops;
}
}  // namespace detail

void tanh_forward(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::tanh(x[i]);
}

}  // namespace goalgen::kern
