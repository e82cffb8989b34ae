#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace aperiod::simd::detail {

namespace {

void mild_step(const MildStepArgs& a) {
    const std::size_t n = a.out.size();
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t dt = vdupq_n_f64(a.dt);
    const float64x2_t c = vdupq_n_f64(a.drift_gain);
    const float64x2_t gamma = vdupq_n_f64(a.diffusion_gain);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t x = vld1q_f64(a.x.data() + i);
        const float64x2_t s = vdivq_f64(x, vaddq_f64(one, vabsq_f64(x)));
        const float64x2_t f = vaddq_f64(vld1q_f64(a.forcing.data() + i), vmulq_f64(c, s));
        const float64x2_t g = vaddq_f64(vld1q_f64(a.sigma.data() + i), vmulq_f64(gamma, s));
        const float64x2_t drift = vaddq_f64(vld1q_f64(a.y.data() + i), vmulq_f64(f, dt));
        const float64x2_t total = vaddq_f64(drift, vmulq_f64(g, vld1q_f64(a.dw.data() + i)));
        vst1q_f64(a.out.data() + i, vmulq_f64(vld1q_f64(a.decay.data() + i), total));
    }
    mild_step_scalar(a, i);
}

void cost_row(const CostRowArgs& a) {
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t j = 0;
    for (; j + 2 <= a.count; j += 2) {
        float64x2_t worst = vdupq_n_f64(0.0);
        for (std::size_t node = 0; node < a.nodes; ++node) {
            float64x2_t acc = vdupq_n_f64(0.0);
            for (std::size_t c = 0; c < a.dim; ++c) {
                const std::size_t row = node * a.dim + c;
                const float64x2_t diff =
                    vsubq_f64(vdupq_n_f64(a.atom[row]), vld1q_f64(a.others.data() + row * a.stride + j));
                acc = vaddq_f64(acc, vmulq_f64(diff, diff));
            }
            worst = vmaxq_f64(acc, worst);
        }
        vst1q_f64(a.out.data() + j, vminq_f64(vsqrtq_f64(worst), one));
    }
    cost_row_scalar(a, j);
}

}  // namespace

const KernelTable& neon_kernels() noexcept {
    static const KernelTable table{Isa::neon, &mild_step, &cost_row};
    return table;
}

}  // namespace aperiod::simd::detail
