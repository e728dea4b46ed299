#include <cstdlib>
#include <cstring>

#include "thinfb/simd/kernels.hpp"

namespace thinfb::simd {

#ifdef THINFB_BUILD_AVX2
const KernelTable* avx2_kernels_compiled();
#endif

const KernelTable* avx2_kernels() {
#ifdef THINFB_BUILD_AVX2
    if (__builtin_cpu_supports("avx2")) return avx2_kernels_compiled();
#endif
    return nullptr;
}

const KernelTable& active_kernels() {
    static const KernelTable& chosen = [] () -> const KernelTable& {
        const char* env = std::getenv("THINFB_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
        if (const KernelTable* t = avx2_kernels()) return *t;
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace thinfb::simd
