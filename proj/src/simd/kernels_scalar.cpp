#include "aperiod/simd/kernels.hpp"

#include <cmath>

#include "kernels_impl.hpp"

namespace aperiod::simd {

namespace detail {

void mild_step_scalar(const MildStepArgs& a, std::size_t begin) {
    const std::size_t n = a.out.size();
    for (std::size_t i = begin; i < n; ++i) {
        const double x = a.x[i];
        const double s = x / (1.0 + std::fabs(x));
        const double f = a.forcing[i] + a.drift_gain * s;
        const double g = a.sigma[i] + a.diffusion_gain * s;
        a.out[i] = a.decay[i] * ((a.y[i] + f * a.dt) + g * a.dw[i]);
    }
}

void cost_row_scalar(const CostRowArgs& a, std::size_t begin) {
    for (std::size_t j = begin; j < a.count; ++j) {
        double worst = 0.0;
        for (std::size_t node = 0; node < a.nodes; ++node) {
            double acc = 0.0;
            for (std::size_t c = 0; c < a.dim; ++c) {
                const std::size_t row = node * a.dim + c;
                const double diff = a.atom[row] - a.others[row * a.stride + j];
                acc = acc + diff * diff;
            }
            worst = acc > worst ? acc : worst;
        }
        const double dist = std::sqrt(worst);
        a.out[j] = dist < 1.0 ? dist : 1.0;
    }
}

}  // namespace detail

namespace {

void mild_step(const MildStepArgs& a) { detail::mild_step_scalar(a, 0); }
void cost_row(const CostRowArgs& a) { detail::cost_row_scalar(a, 0); }

}  // namespace

const KernelTable& scalar_kernels() noexcept {
    static const KernelTable table{Isa::scalar, &mild_step, &cost_row};
    return table;
}

}  // namespace aperiod::simd
