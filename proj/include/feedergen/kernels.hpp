#pragma once

#include <cstddef>

namespace feedergen::kernels {

// Dense double-precision primitives behind the tensor ops. Every entry has a
// scalar reference implementation and, where the build target supports it, a
// SIMD variant (AVX2 on x86-64, NEON on aarch64). The SIMD variants vectorize
// across independent output elements and keep each element's accumulation
// order identical to the scalar code, so both paths produce bitwise-equal
// results; the equivalence tests assert exact equality.
struct Ops {
  // c[m x n] = a[m x k] * b[k x n]
  void (*matmul)(const double* a, const double* b, double* c, int m, int k, int n);
  // c[m x n] = a^T * b, a stored [k x m], b [k x n]
  void (*matmul_tn)(const double* a, const double* b, double* c, int m, int k, int n);
  // c[m x n] = a * b^T, a stored [m x k], b [n x k]
  void (*matmul_nt)(const double* a, const double* b, double* c, int m, int k, int n);

  void (*add)(const double* a, const double* b, double* c, size_t n);
  void (*sub)(const double* a, const double* b, double* c, size_t n);
  void (*hadamard)(const double* a, const double* b, double* c, size_t n);
  void (*axpy)(double alpha, const double* x, double* y, size_t n);   // y += alpha*x
  void (*scale)(double alpha, const double* x, double* y, size_t n);  // y = alpha*x
  void (*clamp)(double lo, double hi, double* x, size_t n);
  void (*relu)(const double* x, double* y, size_t n);
  void (*leaky_relu)(double slope, const double* x, double* y, size_t n);
  // RMSProp step: acc = decay*acc + (1-decay)*g^2; p += sign*lr*g/sqrt(acc+eps)
  void (*rmsprop)(double lr, double decay, double eps, double sign, const double* g,
                  double* acc, double* p, size_t n);

  const char* name;
};

const Ops& scalar_ops();

// Variant compiled for this target's SIMD extension, or null when the build
// has none (the dispatcher then always picks scalar).
const Ops* simd_ops();

// True when the running CPU can execute the compiled SIMD variant.
bool simd_supported();

// Active table: SIMD when compiled in and supported, else scalar. The
// environment variable FEEDERGEN_KERNELS=scalar|simd overrides (simd falls
// back to scalar with the reason available via active().name).
const Ops& active();

// Test hook: force a specific table (nullptr restores automatic selection).
void force(const Ops* ops);

}  // namespace feedergen::kernels
