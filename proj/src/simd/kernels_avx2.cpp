// Built with -mavx2 only (no -mfma): every product is rounded before the
// following add, exactly like the scalar reference.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace aperiod::simd::detail {

namespace {

void mild_step(const MildStepArgs& a) {
    const std::size_t n = a.out.size();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d dt = _mm256_set1_pd(a.dt);
    const __m256d c = _mm256_set1_pd(a.drift_gain);
    const __m256d gamma = _mm256_set1_pd(a.diffusion_gain);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(a.x.data() + i);
        const __m256d s = _mm256_div_pd(x, _mm256_add_pd(one, _mm256_andnot_pd(sign, x)));
        const __m256d f = _mm256_add_pd(_mm256_loadu_pd(a.forcing.data() + i), _mm256_mul_pd(c, s));
        const __m256d g = _mm256_add_pd(_mm256_loadu_pd(a.sigma.data() + i), _mm256_mul_pd(gamma, s));
        const __m256d drift = _mm256_add_pd(_mm256_loadu_pd(a.y.data() + i), _mm256_mul_pd(f, dt));
        const __m256d total = _mm256_add_pd(drift, _mm256_mul_pd(g, _mm256_loadu_pd(a.dw.data() + i)));
        _mm256_storeu_pd(a.out.data() + i, _mm256_mul_pd(_mm256_loadu_pd(a.decay.data() + i), total));
    }
    mild_step_scalar(a, i);
}

void cost_row(const CostRowArgs& a) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t j = 0;
    for (; j + 4 <= a.count; j += 4) {
        __m256d worst = _mm256_setzero_pd();
        for (std::size_t node = 0; node < a.nodes; ++node) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t c = 0; c < a.dim; ++c) {
                const std::size_t row = node * a.dim + c;
                const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(a.atom[row]),
                                                   _mm256_loadu_pd(a.others.data() + row * a.stride + j));
                acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
            }
            // max(acc, worst) returns the second operand on ties, matching the scalar select.
            worst = _mm256_max_pd(acc, worst);
        }
        _mm256_storeu_pd(a.out.data() + j, _mm256_min_pd(_mm256_sqrt_pd(worst), one));
    }
    cost_row_scalar(a, j);
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
    static const KernelTable table{Isa::avx2, &mild_step, &cost_row};
    return table;
}

}  // namespace aperiod::simd::detail
