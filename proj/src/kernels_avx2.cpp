// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; it must not be entered on CPUs without those features (the
// dispatcher checks __builtin_cpu_supports before handing out these ops).
#include "goalgen/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace goalgen::kern {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

void matvec_avx2(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, const double* bias, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = (bias ? bias[r] : 0.0) + dot_avx2(w + r * cols, x, cols);
  }
}

void matvec_t_avx2(const double* w, std::size_t rows, std::size_t cols,
                   const double* g, double* out) {
  for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    axpy_avx2(g[r], w + r * cols, out, cols);
  }
}

void rank1_avx2(double* w, std::size_t rows, std::size_t cols,
                const double* g, const double* x, double alpha) {
  for (std::size_t r = 0; r < rows; ++r) {
    axpy_avx2(alpha * g[r], x, w + r * cols, cols);
  }
}

void relu_avx2(double* x, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_max_pd(zero, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_avx2(const double* pre, const double* upstream, double* out,
                        std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(mask, _mm256_loadu_pd(upstream + i)));
  }
  for (; i < n; ++i) out[i] = pre[i] > 0.0 ? upstream[i] : 0.0;
}

void tanh_backward_avx2(const double* act, const double* upstream, double* out,
                        std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(act + i);
    __m256d d = _mm256_fnmadd_pd(a, a, one);  // 1 - a*a
    _mm256_storeu_pd(out + i, _mm256_mul_pd(d, _mm256_loadu_pd(upstream + i)));
  }
  for (; i < n; ++i) out[i] = upstream[i] * (1.0 - act[i] * act[i]);
}

}  // namespace

namespace detail {
const Ops* avx2_ops() {
  static const Ops ops = {
      dot_avx2,  axpy_avx2,          scale_avx2,
      matvec_avx2, matvec_t_avx2,    rank1_avx2,
      relu_avx2, relu_backward_avx2, tanh_backward_avx2,
  };
  return &ops;
}
}  // namespace detail

}  // namespace goalgen::kern

#else

namespace goalgen::kern::detail {
const Ops* avx2_ops() { return nullptr; }
}  // namespace goalgen::kern::detail

#endif
