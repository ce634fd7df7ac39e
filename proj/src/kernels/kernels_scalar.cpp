#include <cmath>

#include "feedergen/kernels.hpp"

// Reference kernels. These define the semantics; SIMD variants must match them
// bitwise (see tests/test_kernels.cpp). Keep the loops dumb and the
// accumulation order obvious.

namespace feedergen::kernels {
namespace {

void s_matmul(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) c[i * n + j] = 0.0;
    for (int p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      for (int j = 0; j < n; ++j) c[i * n + j] += aip * b[p * n + j];
    }
  }
}

void s_matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
  // c[i,j] = sum_p a[p,i] * b[p,j]
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) c[i * n + j] = 0.0;
    for (int p = 0; p < k; ++p) {
      const double api = a[p * m + i];
      for (int j = 0; j < n; ++j) c[i * n + j] += api * b[p * n + j];
    }
  }
}

void s_matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
  // c[i,j] = sum_p a[i,p] * b[j,p]
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) c[i * n + j] = 0.0;
    for (int p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      for (int j = 0; j < n; ++j) c[i * n + j] += aip * b[j * k + p];
    }
  }
}

void s_add(const double* a, const double* b, double* c, size_t n) {
  for (size_t i = 0; i < n; ++i) c[i] = a[i] + b[i];
}

void s_sub(const double* a, const double* b, double* c, size_t n) {
  for (size_t i = 0; i < n; ++i) c[i] = a[i] - b[i];
}

void s_hadamard(const double* a, const double* b, double* c, size_t n) {
  for (size_t i = 0; i < n; ++i) c[i] = a[i] * b[i];
}

void s_axpy(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void s_scale(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = alpha * x[i];
}

void s_clamp(double lo, double hi, double* x, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    double v = x[i];
    if (v < lo) v = lo;
    if (v > hi) v = hi;
    x[i] = v;
  }
}

void s_relu(const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void s_leaky_relu(double slope, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void s_rmsprop(double lr, double decay, double eps, double sign, const double* g, double* acc,
               double* p, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    acc[i] = decay * acc[i] + (1.0 - decay) * (g[i] * g[i]);
    p[i] += sign * lr * g[i] / std::sqrt(acc[i] + eps);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {s_matmul, s_matmul_tn, s_matmul_nt, s_add,        s_sub,
                          s_hadamard, s_axpy,    s_scale,     s_clamp,      s_relu,
                          s_leaky_relu, s_rmsprop, "scalar"};
  return ops;
}

}  // namespace feedergen::kernels
