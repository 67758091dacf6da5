#include <cmath>

#include "mlbs/kernels.hpp"

namespace mlbs::kernels {
namespace {

void gemv(const double* W, const double* x, const double* b, double* y,
          std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b ? b[r] : 0.0;
    const double* row = W + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void gemv_t(const double* W, const double* g, double* out, std::size_t rows,
            std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = W + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * gr;
  }
}

void ger_acc(double* dW, const double* g, const double* x, std::size_t rows,
             std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = dW + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += gr * x[c];
  }
}

void relu(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* pre, const double* g, double* dx,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = pre[i] > 0.0 ? g[i] : 0.0;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void adam_step(double* param, double* m, double* v, const double* g,
               std::size_t n, double lr, double beta1, double beta2, double eps,
               double bc1, double bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    param[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {"scalar", gemv,  gemv_t, ger_acc,  relu,
                          relu_backward,  axpy,   dot,      adam_step};
  return ops;
}

}  // namespace mlbs::kernels
