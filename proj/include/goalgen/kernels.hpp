#pragma once

#include <cstddef>

// Data-parallel inner loops used by the nn module. Every operation has a
// scalar reference implementation and, on x86-64 with AVX2+FMA, a vectorized
// variant. The backend is picked once at startup from CPU features; tests
// force each backend explicitly and check the variants agree.
namespace goalgen::kern {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name(Backend b);
// Overrides the startup choice. Requesting avx2 on a CPU without it falls
// back to scalar; returns the backend actually selected.
Backend force_backend(Backend b);

// y . x
double dot(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// x *= alpha
void scale(double alpha, double* x, std::size_t n);
// y = W x + bias;  W is rows x cols row-major; bias may be null.
void matvec(const double* w, std::size_t rows, std::size_t cols,
            const double* x, const double* bias, double* y);
// out = W^T g (overwrites out, length cols).
void matvec_t(const double* w, std::size_t rows, std::size_t cols,
              const double* g, double* out);
// W += alpha * g x^T  (rank-1 update; g has length rows, x length cols).
void rank1_update(double* w, std::size_t rows, std::size_t cols,
                  const double* g, const double* x, double alpha);
// x = max(x, 0)
void relu(double* x, std::size_t n);
// out = upstream where pre > 0, else 0.
void relu_backward(const double* pre, const double* upstream, double* out,
                   std::size_t n);
// x = tanh(x) elementwise. Scalar on every backend (libm call dominates).
void tanh_forward(double* x, std::size_t n);
// out = upstream * (1 - act^2), act = tanh(pre) from the forward pass.
void tanh_backward(const double* act, const double* upstream, double* out,
                   std::size_t n);

namespace detail {
struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  void (*matvec)(const double*, std::size_t, std::size_t, const double*,
                 const double*, double*);
  void (*matvec_t)(const double*, std::size_t, std::size_t, const double*,
                   double*);
  void (*rank1_update)(double*, std::size_t, std::size_t, const double*,
                       const double*, double);
  void (*relu)(double*, std::size_t);
  void (*relu_backward)(const double*, const double*, double*, std::size_t);
  void (*tanh_backward)(const double*, const double*, double*, std::size_t);
};
const Ops& scalar_ops();
const Ops* avx2_ops();  // null when the CPU lacks AVX2/FMA
}  // namespace detail

}  // namespace goalgen::kern
