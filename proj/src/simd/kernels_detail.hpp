#pragma once

#include "grar/simd/kernels.hpp"

namespace grar::simd::detail {

#if defined(GRAR_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(GRAR_HAVE_NEON)
const KernelTable& neon_table() noexcept;
#endif

}  // namespace grar::simd::detail
