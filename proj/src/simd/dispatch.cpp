#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace aperiod::simd {

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

const KernelTable* kernels_for(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return &scalar_kernels();
        case Isa::avx2:
#if defined(APERIOD_HAVE_AVX2)
            if (__builtin_cpu_supports("avx2")) return &detail::avx2_kernels();
#endif
            return nullptr;
        case Isa::neon:
#if defined(APERIOD_HAVE_NEON)
            return &detail::neon_kernels();
#else
            return nullptr;
#endif
    }
    return nullptr;
}

namespace {

const KernelTable& select_kernels() noexcept {
    if (const char* forced = std::getenv("APERIOD_SDE_SIMD"); forced && std::string_view(forced) == "scalar") {
        return scalar_kernels();
    }
    for (Isa isa : {Isa::avx2, Isa::neon}) {
        if (const KernelTable* table = kernels_for(isa)) return *table;
    }
    return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() noexcept {
    static const KernelTable& table = select_kernels();
    return table;
}

}  // namespace aperiod::simd
