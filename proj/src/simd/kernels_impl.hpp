#pragma once

#include "aperiod/simd/kernels.hpp"

namespace aperiod::simd::detail {

// Scalar loops starting at an offset; vector variants use them for tails.
void mild_step_scalar(const MildStepArgs& a, std::size_t begin);
void cost_row_scalar(const CostRowArgs& a, std::size_t begin);

#if defined(APERIOD_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif
#if defined(APERIOD_HAVE_NEON)
const KernelTable& neon_kernels() noexcept;
#endif

}  // namespace aperiod::simd::detail
