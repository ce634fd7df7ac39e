#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "feedergen/kernels.hpp"
#include "feedergen/rng.hpp"

using feedergen::Rng;
namespace kernels = feedergen::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, size_t n, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

// Reference triple loop; the kernel contract fixes the same accumulation
// order (k innermost, ascending), so comparisons are exact.
std::vector<double> naive_matmul(const std::vector<double>& a, const std::vector<double>& b, int m,
                                 int k, int n) {
  std::vector<double> c(static_cast<size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += a[static_cast<size_t>(i) * k + p] * b[static_cast<size_t>(p) * n + j];
      c[static_cast<size_t>(i) * n + j] = s;
    }
  return c;
}

std::vector<double> transpose(const std::vector<double>& a, int rows, int cols) {
  std::vector<double> t(a.size());
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t[static_cast<size_t>(j) * rows + i] = a[static_cast<size_t>(i) * cols + j];
  return t;
}

}  // namespace

TEST_CASE("matmul matches the reference triple loop") {
  Rng rng(11);
  const kernels::Ops& ops = kernels::active();
  for (int m : {1, 2, 3, 5, 8}) {
    for (int k : {1, 3, 4, 7}) {
      for (int n : {1, 2, 5, 9}) {
        const auto a = random_vec(rng, static_cast<size_t>(m) * k);
        const auto b = random_vec(rng, static_cast<size_t>(k) * n);
        std::vector<double> c(static_cast<size_t>(m) * n, -1.0);
        ops.matmul(a.data(), b.data(), c.data(), m, k, n);
        const auto want = naive_matmul(a, b, m, k, n);
        for (size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(want[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("matmul_tn and matmul_nt agree with explicit transposition") {
  Rng rng(12);
  const kernels::Ops& ops = kernels::active();
  const int m = 4, k = 5, n = 3;
  const auto a_t = random_vec(rng, static_cast<size_t>(k) * m);  // stored [k x m]
  const auto b = random_vec(rng, static_cast<size_t>(k) * n);
  std::vector<double> c(static_cast<size_t>(m) * n, 0.0);
  ops.matmul_tn(a_t.data(), b.data(), c.data(), m, k, n);
  const auto want_tn = naive_matmul(transpose(a_t, k, m), b, m, k, n);
  for (size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(want_tn[i]).epsilon(1e-12));

  const auto a2 = random_vec(rng, static_cast<size_t>(m) * k);
  const auto b2 = random_vec(rng, static_cast<size_t>(n) * k);  // stored [n x k]
  ops.matmul_nt(a2.data(), b2.data(), c.data(), m, k, n);
  const auto want_nt = naive_matmul(a2, transpose(b2, n, k), m, k, n);
  for (size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(want_nt[i]).epsilon(1e-12));
}

TEST_CASE("elementwise kernels compute what their names say") {
  const kernels::Ops& ops = kernels::active();
  const std::vector<double> a{1.0, -2.0, 3.5, 0.0, -0.25};
  const std::vector<double> b{0.5, 4.0, -1.0, 2.0, 8.0};
  std::vector<double> c(a.size(), 0.0);

  ops.add(a.data(), b.data(), c.data(), a.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(c[i] == a[i] + b[i]);

  ops.sub(a.data(), b.data(), c.data(), a.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(c[i] == a[i] - b[i]);

  ops.hadamard(a.data(), b.data(), c.data(), a.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(c[i] == a[i] * b[i]);

  std::vector<double> y = b;
  ops.axpy(2.0, a.data(), y.data(), a.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(y[i] == b[i] + 2.0 * a[i]);

  ops.scale(-3.0, a.data(), c.data(), a.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(c[i] == -3.0 * a[i]);

  std::vector<double> z = a;
  ops.clamp(-1.0, 1.0, z.data(), z.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(z[i] == std::min(1.0, std::max(-1.0, a[i])));
  }

  ops.relu(a.data(), c.data(), a.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(c[i] == (a[i] > 0.0 ? a[i] : 0.0));

  ops.leaky_relu(0.01, a.data(), c.data(), a.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(c[i] == (a[i] > 0.0 ? a[i] : 0.01 * a[i]));
}

TEST_CASE("rmsprop kernel applies the update rule") {
  const kernels::Ops& ops = kernels::active();
  // First step from a zero accumulator with unit gradient: the accumulator
  // becomes (1-decay) and the update magnitude lr/sqrt(1-decay+eps).
  std::vector<double> g{1.0};
  std::vector<double> acc{0.0};
  std::vector<double> p{0.0};
  const double lr = 1e-4, decay = 0.9, eps = 1e-8;
  ops.rmsprop(lr, decay, eps, +1.0, g.data(), acc.data(), p.data(), 1);
  CHECK(acc[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(lr / std::sqrt(0.1 + eps)).epsilon(1e-12));

  // Zero gradient leaves the parameter alone.
  g[0] = 0.0;
  const double before = p[0];
  ops.rmsprop(lr, decay, eps, -1.0, g.data(), acc.data(), p.data(), 1);
  CHECK(p[0] == before);
}

TEST_CASE("scalar and active backends produce bitwise-equal results") {
  const kernels::Ops& ref = kernels::scalar_ops();
  const kernels::Ops& act = kernels::active();
  INFO("active backend: ", act.name);
  Rng rng(99);

  // Sizes straddling vector widths, including odd tails and tiny inputs.
  for (size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 100u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    std::vector<double> c1(n), c2(n);

    ref.add(a.data(), b.data(), c1.data(), n);
    act.add(a.data(), b.data(), c2.data(), n);
    CHECK(c1 == c2);

    ref.sub(a.data(), b.data(), c1.data(), n);
    act.sub(a.data(), b.data(), c2.data(), n);
    CHECK(c1 == c2);

    ref.hadamard(a.data(), b.data(), c1.data(), n);
    act.hadamard(a.data(), b.data(), c2.data(), n);
    CHECK(c1 == c2);

    std::vector<double> y1 = b, y2 = b;
    ref.axpy(1.25, a.data(), y1.data(), n);
    act.axpy(1.25, a.data(), y2.data(), n);
    CHECK(y1 == y2);

    ref.scale(-0.75, a.data(), c1.data(), n);
    act.scale(-0.75, a.data(), c2.data(), n);
    CHECK(c1 == c2);

    std::vector<double> z1 = a, z2 = a;
    ref.clamp(-0.5, 0.5, z1.data(), n);
    act.clamp(-0.5, 0.5, z2.data(), n);
    CHECK(z1 == z2);

    ref.relu(a.data(), c1.data(), n);
    act.relu(a.data(), c2.data(), n);
    CHECK(c1 == c2);

    ref.leaky_relu(0.01, a.data(), c1.data(), n);
    act.leaky_relu(0.01, a.data(), c2.data(), n);
    CHECK(c1 == c2);

    auto acc1 = random_vec(rng, n, 0.0, 1.0);
    auto acc2 = acc1;
    auto p1 = random_vec(rng, n);
    auto p2 = p1;
    ref.rmsprop(1e-4, 0.9, 1e-8, +1.0, a.data(), acc1.data(), p1.data(), n);
    act.rmsprop(1e-4, 0.9, 1e-8, +1.0, a.data(), acc2.data(), p2.data(), n);
    CHECK(acc1 == acc2);
    CHECK(p1 == p2);
  }

  // Matmul family with shapes exercising partial vectors in every dimension.
  for (int m : {1, 2, 5}) {
    for (int k : {1, 4, 7}) {
      for (int n : {1, 3, 8, 11}) {
        const auto a = random_vec(rng, static_cast<size_t>(m) * k);
        const auto b = random_vec(rng, static_cast<size_t>(k) * n);
        std::vector<double> c1(static_cast<size_t>(m) * n), c2(c1.size());
        ref.matmul(a.data(), b.data(), c1.data(), m, k, n);
        act.matmul(a.data(), b.data(), c2.data(), m, k, n);
        CHECK(c1 == c2);

        const auto at = random_vec(rng, static_cast<size_t>(k) * m);
        ref.matmul_tn(at.data(), b.data(), c1.data(), m, k, n);
        act.matmul_tn(at.data(), b.data(), c2.data(), m, k, n);
        CHECK(c1 == c2);

        const auto bt = random_vec(rng, static_cast<size_t>(n) * k);
        ref.matmul_nt(a.data(), bt.data(), c1.data(), m, k, n);
        act.matmul_nt(a.data(), bt.data(), c2.data(), m, k, n);
        CHECK(c1 == c2);
      }
    }
  }
}

TEST_CASE("backend forcing overrides automatic selection") {
  const kernels::Ops& before = kernels::active();
  kernels::force(&kernels::scalar_ops());
  CHECK(std::string(kernels::active().name) == std::string(kernels::scalar_ops().name));
  kernels::force(nullptr);
  CHECK(std::string(kernels::active().name) == std::string(before.name));
  if (kernels::simd_ops() != nullptr && kernels::simd_supported()) {
    kernels::force(kernels::simd_ops());
    CHECK(std::string(kernels::active().name) == std::string(kernels::simd_ops()->name));
    kernels::force(nullptr);
  }
}
