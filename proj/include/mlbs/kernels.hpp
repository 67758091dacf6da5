#pragma once

#include <cstddef>

namespace mlbs::kernels {

// Dense double-precision primitives behind the policy/value network. Two
// implementations: a scalar reference and an AVX2+FMA variant, selected at
// runtime. Set MLBS_KERNELS=scalar|avx2 to force one.
struct Ops {
  const char* name;
  // y = W x + b, W row-major (rows x cols)
  void (*gemv)(const double* W, const double* x, const double* b, double* y,
               std::size_t rows, std::size_t cols);
  // out = W^T g  (length cols)
  void (*gemv_t)(const double* W, const double* g, double* out,
                 std::size_t rows, std::size_t cols);
  // dW += g x^T
  void (*ger_acc)(double* dW, const double* g, const double* x,
                  std::size_t rows, std::size_t cols);
  void (*relu)(const double* x, double* y, std::size_t n);
  // dy masked by pre-activation sign: dx = (pre > 0) ? g : 0
  void (*relu_backward)(const double* pre, const double* g, double* dx,
                        std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // Adam with bias-corrected step; bc1 = 1 - beta1^t, bc2 = 1 - beta2^t.
  void (*adam_step)(double* param, double* m, double* v, const double* g,
                    std::size_t n, double lr, double beta1, double beta2,
                    double eps, double bc1, double bc2);
};

const Ops& scalar_ops();
const Ops& avx2_ops();  // falls back to scalar when AVX2 is unavailable
bool avx2_available();

// The dispatch choice, resolved once per process.
const Ops& active();

}  // namespace mlbs::kernels
