#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace feedergen::kernels {

namespace {
std::atomic<const Ops*> g_forced{nullptr};
}

const Ops* simd_ops() {
#if defined(FEEDERGEN_KERNELS_AVX2)
  return &avx2_ops();
#elif defined(FEEDERGEN_KERNELS_NEON)
  return &neon_ops();
#else
  return nullptr;
#endif
}

bool simd_supported() {
#if defined(FEEDERGEN_KERNELS_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#elif defined(FEEDERGEN_KERNELS_NEON)
  return true;  // NEON is baseline on aarch64
#else
  return false;
#endif
}

const Ops& active() {
  const Ops* forced = g_forced.load(std::memory_order_relaxed);
  if (forced) return *forced;
  static const Ops* selected = [] {
    const char* env = std::getenv("FEEDERGEN_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar_ops();
    const Ops* simd = simd_ops();
    if (simd && simd_supported()) return simd;
    return &scalar_ops();
  }();
  return *selected;
}

void force(const Ops* ops) { g_forced.store(ops, std::memory_order_relaxed); }

}  // namespace feedergen::kernels
