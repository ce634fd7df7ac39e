#pragma once

#include "feedergen/kernels.hpp"

namespace feedergen::kernels {

#if defined(FEEDERGEN_KERNELS_AVX2)
const Ops& avx2_ops();
#endif
#if defined(FEEDERGEN_KERNELS_NEON)
const Ops& neon_ops();
#endif

}  // namespace feedergen::kernels
