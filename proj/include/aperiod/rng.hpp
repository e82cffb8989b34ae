#pragma once

// Counter-based Philox4x32-10 (Salmon et al., SC'11). A stream is addressed by
// (key, counter); the ensemble code keys on the root seed and puts the path
// index in the upper counter words, so any path can be regenerated in
// isolation and in any order.

#include <array>
#include <cstdint>

namespace aperiod::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter philox4x32(Counter ctr, Key key) noexcept;

/// Gaussian stream for one (seed, stream index) pair. Draws come in pairs
/// (Box-Muller), one Philox block per pair.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept;

    double next() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double next_uniform() noexcept;

private:
    Counter block() noexcept;

    Key key_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace aperiod::rng
