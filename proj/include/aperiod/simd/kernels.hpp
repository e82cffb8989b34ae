#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation and optional vector variants (AVX2 on x86-64, NEON on
// AArch64). Variants evaluate the same expression tree lane by lane, so the
// results are bit-identical to the scalar path; the dispatcher may therefore
// pick any available variant without affecting reproducibility.

#include <cstddef>
#include <span>
#include <string_view>

namespace aperiod::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

/// Arguments of one exponential-Euler step for a single path, all of length d:
///   s   = x / (1 + |x|)
///   out = decay * (y + (forcing + drift_gain*s)*dt + (sigma + diffusion_gain*s)*dw)
/// where `x` is the point at which the coefficients are evaluated and `y`
/// the value being propagated. Coordinates with no noise column carry dw = 0.
struct MildStepArgs {
    std::span<double> out;
    std::span<const double> y;
    std::span<const double> x;
    std::span<const double> forcing;
    std::span<const double> sigma;
    std::span<const double> dw;
    std::span<const double> decay;
    double drift_gain = 0.0;
    double diffusion_gain = 0.0;
    double dt = 0.0;
};

/// One row of a truncated path-space cost matrix.
///   atom:    nodes*dim values, node-major.
///   others:  structure-of-arrays, others[(node*dim + c)*stride + j].
///   out[j] = min(max_node ||atom(node) - other_j(node)||, 1)  for j < count.
struct CostRowArgs {
    std::span<const double> atom;
    std::span<const double> others;
    std::size_t nodes = 1;
    std::size_t dim = 1;
    std::size_t count = 0;
    std::size_t stride = 0;
    std::span<double> out;
};

struct KernelTable {
    Isa isa;
    void (*mild_step)(const MildStepArgs&);
    void (*cost_row)(const CostRowArgs&);
};

/// Reference implementations.
const KernelTable& scalar_kernels() noexcept;

/// Vector implementation for `isa` if compiled in and supported by the CPU,
/// otherwise nullptr.
const KernelTable* kernels_for(Isa isa) noexcept;

/// Best available table, chosen once per process. Setting the environment
/// variable APERIOD_SDE_SIMD=scalar forces the reference path.
const KernelTable& active_kernels() noexcept;

}  // namespace aperiod::simd
