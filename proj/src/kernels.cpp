#include "goalgen/kernels.hpp"

namespace goalgen::kern {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Dispatch {
  const detail::Ops* ops;
  Backend backend;
  Dispatch() {
    if (cpu_has_avx2() && detail::avx2_ops()) {
      ops = detail::avx2_ops();
      backend = Backend::avx2;
    } else {
      ops = &detail::scalar_ops();
      backend = Backend::scalar;
    }
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

Backend force_backend(Backend b) {
  Dispatch& d = dispatch();
  if (b == Backend::avx2 && cpu_has_avx2() && detail::avx2_ops()) {
    d.ops = detail::avx2_ops();
    d.backend = Backend::avx2;
  } else {
    d.ops = &detail::scalar_ops();
    d.backend = Backend::scalar;
  }
  return d.backend;
}

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().ops->dot(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  dispatch().ops->axpy(alpha, x, y, n);
}
void scale(double alpha, double* x, std::size_t n) {
  dispatch().ops->scale(alpha, x, n);
}
void matvec(const double* w, std::size_t rows, std::size_t cols,
            const double* x, const double* bias, double* y) {
  dispatch().ops->matvec(w, rows, cols, x, bias, y);
}
void matvec_t(const double* w, std::size_t rows, std::size_t cols,
              const double* g, double* out) {
  dispatch().ops->matvec_t(w, rows, cols, g, out);
}
void rank1_update(double* w, std::size_t rows, std::size_t cols,
                  const double* g, const double* x, double alpha) {
  dispatch().ops->rank1_update(w, rows, cols, g, x, alpha);
}
void relu(double* x, std::size_t n) { dispatch().ops->relu(x, n); }
void relu_backward(const double* pre, const double* upstream, double* out,
                   std::size_t n) {
  dispatch().ops->relu_backward(pre, upstream, out, n);
}
void tanh_backward(const double* act, const double* upstream, double* out,
                   std::size_t n) {
  dispatch().ops->tanh_backward(act, upstream, out, n);
}

}  // namespace goalgen::kern
