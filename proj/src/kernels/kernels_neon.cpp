// NEON kernel variants (aarch64). Same layout discipline as the AVX2 file:
// two independent output elements per vector, scalar-identical per-element
// operation order, scalar tail loops.

#include "kernels_internal.hpp"

#if defined(FEEDERGEN_KERNELS_NEON)

#include <arm_neon.h>

#include <cmath>

namespace feedergen::kernels {
namespace {

void v_matmul(const double* a, const double* b, double* c, int m, int k, int n) {
  const int n2 = n & ~1;
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) crow[j] = 0.0;
    const double* arow = a + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double aip = arow[p];
      const float64x2_t av = vdupq_n_f64(aip);
      const double* brow = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n2; j += 2) {
        float64x2_t cv = vld1q_f64(crow + j);
        cv = vaddq_f64(cv, vmulq_f64(av, vld1q_f64(brow + j)));
        vst1q_f64(crow + j, cv);
      }
      for (int j = n2; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void v_matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
  const int n2 = n & ~1;
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) crow[j] = 0.0;
    for (int p = 0; p < k; ++p) {
      const double api = a[static_cast<size_t>(p) * m + i];
      const float64x2_t av = vdupq_n_f64(api);
      const double* brow = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n2; j += 2) {
        float64x2_t cv = vld1q_f64(crow + j);
        cv = vaddq_f64(cv, vmulq_f64(av, vld1q_f64(brow + j)));
        vst1q_f64(crow + j, cv);
      }
      for (int j = n2; j < n; ++j) crow[j] += api * brow[j];
    }
  }
}

void v_matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
  const int n2 = n & ~1;
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) crow[j] = 0.0;
    const double* arow = a + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double aip = arow[p];
      const float64x2_t av = vdupq_n_f64(aip);
      const double* bp = b + p;
      for (int j = 0; j < n2; j += 2) {
        const double lane0 = bp[static_cast<size_t>(j) * k];
        const double lane1 = bp[static_cast<size_t>(j + 1) * k];
        const float64x2_t bv = {lane0, lane1};
        float64x2_t cv = vld1q_f64(crow + j);
        cv = vaddq_f64(cv, vmulq_f64(av, bv));
        vst1q_f64(crow + j, cv);
      }
      for (int j = n2; j < n; ++j) crow[j] += aip * bp[static_cast<size_t>(j) * k];
    }
  }
}

void v_add(const double* a, const double* b, double* c, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(c + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) c[i] = a[i] + b[i];
}

void v_sub(const double* a, const double* b, double* c, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(c + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) c[i] = a[i] - b[i];
}

void v_hadamard(const double* a, const double* b, double* c, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(c + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) c[i] = a[i] * b[i];
}

void v_axpy(double alpha, const double* x, double* y, size_t n) {
  const float64x2_t av = vdupq_n_f64(alpha);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t yv = vld1q_f64(y + i);
    yv = vaddq_f64(yv, vmulq_f64(av, vld1q_f64(x + i)));
    vst1q_f64(y + i, yv);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void v_scale(double alpha, const double* x, double* y, size_t n) {
  const float64x2_t av = vdupq_n_f64(alpha);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(av, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = alpha * x[i];
}

void v_clamp(double lo, double hi, double* x, size_t n) {
  const float64x2_t lov = vdupq_n_f64(lo);
  const float64x2_t hiv = vdupq_n_f64(hi);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vld1q_f64(x + i);
    v = vmaxq_f64(v, lov);
    v = vminq_f64(v, hiv);
    vst1q_f64(x + i, v);
  }
  for (; i < n; ++i) {
    double v = x[i];
    if (v < lo) v = lo;
    if (v > hi) v = hi;
    x[i] = v;
  }
}

void v_relu(const double* x, double* y, size_t n) {
  const float64x2_t z = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmaxq_f64(vld1q_f64(x + i), z));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void v_leaky_relu(double slope, const double* x, double* y, size_t n) {
  const float64x2_t z = vdupq_n_f64(0.0);
  const float64x2_t sv = vdupq_n_f64(slope);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    const uint64x2_t mask = vcgtq_f64(xv, z);
    vst1q_f64(y + i, vbslq_f64(mask, xv, vmulq_f64(sv, xv)));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void v_rmsprop(double lr, double decay, double eps, double sign, const double* g, double* acc,
               double* p, size_t n) {
  const float64x2_t dv = vdupq_n_f64(decay);
  const float64x2_t odv = vdupq_n_f64(1.0 - decay);
  const float64x2_t ev = vdupq_n_f64(eps);
  const float64x2_t slv = vdupq_n_f64(sign * lr);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gv = vld1q_f64(g + i);
    float64x2_t av = vld1q_f64(acc + i);
    av = vaddq_f64(vmulq_f64(dv, av), vmulq_f64(odv, vmulq_f64(gv, gv)));
    vst1q_f64(acc + i, av);
    const float64x2_t step = vdivq_f64(vmulq_f64(slv, gv), vsqrtq_f64(vaddq_f64(av, ev)));
    vst1q_f64(p + i, vaddq_f64(vld1q_f64(p + i), step));
  }
  for (; i < n; ++i) {
    acc[i] = decay * acc[i] + (1.0 - decay) * (g[i] * g[i]);
    p[i] += sign * lr * g[i] / std::sqrt(acc[i] + eps);
  }
}

}  // namespace

const Ops& neon_ops() {
  static const Ops ops = {v_matmul, v_matmul_tn, v_matmul_nt, v_add,        v_sub,
                          v_hadamard, v_axpy,    v_scale,     v_clamp,      v_relu,
                          v_leaky_relu, v_rmsprop, "neon"};
  return ops;
}

}  // namespace feedergen::kernels

#endif  // FEEDERGEN_KERNELS_NEON
