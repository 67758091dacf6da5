// Compiled with -mavx2 -mfma; only reached after the cpuid check passes.
#include "mlbs/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MLBS_X86 1
#include <immintrin.h>
#else
#define MLBS_X86 0
#endif

#include <cmath>

namespace mlbs::kernels {

#if MLBS_X86

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void gemv(const double* W, const double* x, const double* b, double* y,
          std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = (b ? b[r] : 0.0) + dot(W + r * cols, x, cols);
  }
}

void gemv_t(const double* W, const double* g, double* out, std::size_t rows,
            std::size_t cols) {
  std::size_t c = 0;
  for (; c + 4 <= cols; c += 4) _mm256_storeu_pd(out + c, _mm256_setzero_pd());
  for (; c < cols; ++c) out[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = W + r * cols;
    const __m256d gr = _mm256_set1_pd(g[r]);
    std::size_t i = 0;
    for (; i + 4 <= cols; i += 4) {
      __m256d acc = _mm256_loadu_pd(out + i);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + i), gr, acc);
      _mm256_storeu_pd(out + i, acc);
    }
    for (; i < cols; ++i) out[i] += row[i] * g[r];
  }
}

void ger_acc(double* dW, const double* g, const double* x, std::size_t rows,
             std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = dW + r * cols;
    const __m256d gr = _mm256_set1_pd(g[r]);
    std::size_t i = 0;
    for (; i + 4 <= cols; i += 4) {
      __m256d acc = _mm256_loadu_pd(row + i);
      acc = _mm256_fmadd_pd(gr, _mm256_loadu_pd(x + i), acc);
      _mm256_storeu_pd(row + i, acc);
    }
    for (; i < cols; ++i) row[i] += g[r] * x[i];
  }
}

void relu(const double* x, double* y, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* pre, const double* g, double* dx,
                   std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(dx + i, _mm256_and_pd(mask, _mm256_loadu_pd(g + i)));
  }
  for (; i < n; ++i) dx[i] = pre[i] > 0.0 ? g[i] : 0.0;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_loadu_pd(y + i);
    acc = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), acc);
    _mm256_storeu_pd(y + i, acc);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void adam_step(double* param, double* m, double* v, const double* g,
               std::size_t n, double lr, double beta1, double beta2, double eps,
               double bc1, double bc2) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb1c = _mm256_set1_pd(1.0 - beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vb2c = _mm256_set1_pd(1.0 - beta2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vbc1 = _mm256_set1_pd(bc1);
  const __m256d vbc2 = _mm256_set1_pd(bc2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    __m256d mi = _mm256_loadu_pd(m + i);
    __m256d vi = _mm256_loadu_pd(v + i);
    mi = _mm256_fmadd_pd(vb1, mi, _mm256_mul_pd(vb1c, gi));
    vi = _mm256_fmadd_pd(vb2, vi, _mm256_mul_pd(vb2c, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d mhat = _mm256_div_pd(mi, vbc1);
    const __m256d vhat = _mm256_div_pd(vi, vbc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    const __m256d upd = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
    _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), upd));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    param[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops = {"avx2", gemv,  gemv_t, ger_acc,  relu,
                          relu_backward, axpy,   dot,      adam_step};
  return ops;
}

#else

const Ops& avx2_ops() { return scalar_ops(); }

#endif

}  // namespace mlbs::kernels
