// AVX2 kernel variants. Vector lanes cover four independent output elements;
// within each element the operation order is exactly the scalar kernel's, so
// results are bitwise identical to the reference (this TU builds with
// -ffp-contract=off and no FMA). Compiled only into x86-64 builds; the
// dispatcher checks CPU support at runtime before selecting this table.

#include "kernels_internal.hpp"

#if defined(FEEDERGEN_KERNELS_AVX2)

#include <immintrin.h>

#include <cmath>

namespace feedergen::kernels {
namespace {

void v_matmul(const double* a, const double* b, double* c, int m, int k, int n) {
  const int n4 = n & ~3;
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<size_t>(i) * n;
    for (int j = 0; j < n4; j += 4) _mm256_storeu_pd(crow + j, _mm256_setzero_pd());
    for (int j = n4; j < n; ++j) crow[j] = 0.0;
    const double* arow = a + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double aip = arow[p];
      const __m256d av = _mm256_set1_pd(aip);
      const double* brow = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n4; j += 4) {
        __m256d cv = _mm256_loadu_pd(crow + j);
        cv = _mm256_add_pd(cv, _mm256_mul_pd(av, _mm256_loadu_pd(brow + j)));
        _mm256_storeu_pd(crow + j, cv);
      }
      for (int j = n4; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void v_matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
  const int n4 = n & ~3;
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<size_t>(i) * n;
    for (int j = 0; j < n4; j += 4) _mm256_storeu_pd(crow + j, _mm256_setzero_pd());
    for (int j = n4; j < n; ++j) crow[j] = 0.0;
    for (int p = 0; p < k; ++p) {
      const double api = a[static_cast<size_t>(p) * m + i];
      const __m256d av = _mm256_set1_pd(api);
      const double* brow = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n4; j += 4) {
        __m256d cv = _mm256_loadu_pd(crow + j);
        cv = _mm256_add_pd(cv, _mm256_mul_pd(av, _mm256_loadu_pd(brow + j)));
        _mm256_storeu_pd(crow + j, cv);
      }
      for (int j = n4; j < n; ++j) crow[j] += api * brow[j];
    }
  }
}

void v_matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
  // b rows are strided here, so the loads stay scalar (gathered into a lane
  // vector); the arithmetic is still 4-wide.
  const int n4 = n & ~3;
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<size_t>(i) * n;
    for (int j = 0; j < n4; j += 4) _mm256_storeu_pd(crow + j, _mm256_setzero_pd());
    for (int j = n4; j < n; ++j) crow[j] = 0.0;
    const double* arow = a + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double aip = arow[p];
      const __m256d av = _mm256_set1_pd(aip);
      const double* bp = b + p;
      for (int j = 0; j < n4; j += 4) {
        const __m256d bv =
            _mm256_set_pd(bp[static_cast<size_t>(j + 3) * k], bp[static_cast<size_t>(j + 2) * k],
                          bp[static_cast<size_t>(j + 1) * k], bp[static_cast<size_t>(j) * k]);
        __m256d cv = _mm256_loadu_pd(crow + j);
        cv = _mm256_add_pd(cv, _mm256_mul_pd(av, bv));
        _mm256_storeu_pd(crow + j, cv);
      }
      for (int j = n4; j < n; ++j) crow[j] += aip * bp[static_cast<size_t>(j) * k];
    }
  }
}

void v_add(const double* a, const double* b, double* c, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(c + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) c[i] = a[i] + b[i];
}

void v_sub(const double* a, const double* b, double* c, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(c + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) c[i] = a[i] - b[i];
}

void v_hadamard(const double* a, const double* b, double* c, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(c + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) c[i] = a[i] * b[i];
}

void v_axpy(double alpha, const double* x, double* y, size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_add_pd(yv, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void v_scale(double alpha, const double* x, double* y, size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = alpha * x[i];
}

void v_clamp(double lo, double hi, double* x, size_t n) {
  const __m256d lov = _mm256_set1_pd(lo);
  const __m256d hiv = _mm256_set1_pd(hi);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    v = _mm256_max_pd(v, lov);
    v = _mm256_min_pd(v, hiv);
    _mm256_storeu_pd(x + i, v);
  }
  for (; i < n; ++i) {
    double v = x[i];
    if (v < lo) v = lo;
    if (v > hi) v = hi;
    x[i] = v;
  }
}

void v_relu(const double* x, double* y, size_t n) {
  const __m256d z = _mm256_setzero_pd();
  size_t i = 0;
  // max(x, +0) returns +0 for x == -0, matching the scalar branch.
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), z));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void v_leaky_relu(double slope, const double* x, double* y, size_t n) {
  const __m256d z = _mm256_setzero_pd();
  const __m256d sv = _mm256_set1_pd(slope);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d mask = _mm256_cmp_pd(xv, z, _CMP_GT_OQ);
    _mm256_storeu_pd(y + i, _mm256_blendv_pd(_mm256_mul_pd(sv, xv), xv, mask));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void v_rmsprop(double lr, double decay, double eps, double sign, const double* g, double* acc,
               double* p, size_t n) {
  const __m256d dv = _mm256_set1_pd(decay);
  const __m256d odv = _mm256_set1_pd(1.0 - decay);
  const __m256d ev = _mm256_set1_pd(eps);
  const __m256d slv = _mm256_set1_pd(sign * lr);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gv = _mm256_loadu_pd(g + i);
    __m256d av = _mm256_loadu_pd(acc + i);
    av = _mm256_add_pd(_mm256_mul_pd(dv, av), _mm256_mul_pd(odv, _mm256_mul_pd(gv, gv)));
    _mm256_storeu_pd(acc + i, av);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(slv, gv), _mm256_sqrt_pd(_mm256_add_pd(av, ev)));
    _mm256_storeu_pd(p + i, _mm256_add_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    acc[i] = decay * acc[i] + (1.0 - decay) * (g[i] * g[i]);
    p[i] += sign * lr * g[i] / std::sqrt(acc[i] + eps);
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops = {v_matmul, v_matmul_tn, v_matmul_nt, v_add,        v_sub,
                          v_hadamard, v_axpy,    v_scale,     v_clamp,      v_relu,
                          v_leaky_relu, v_rmsprop, "avx2"};
  return ops;
}

}  // namespace feedergen::kernels

#endif  // FEEDERGEN_KERNELS_AVX2
