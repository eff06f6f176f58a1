#include <cstdlib>
#include <string_view>

#include "rpt/errors.hpp"
#include "rpt/kernels.hpp"

namespace rpt::kernels {

#ifdef RPT_HAVE_AVX2
const MinPlusKernel* avx2_kernel_impl();
#endif
#ifdef RPT_HAVE_NEON
const MinPlusKernel* neon_kernel_impl();
#endif

const MinPlusKernel* avx2_kernel() {
#ifdef RPT_HAVE_AVX2
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok ? avx2_kernel_impl() : nullptr;
#else
    return nullptr;
#endif
}

const MinPlusKernel* neon_kernel() {
#ifdef RPT_HAVE_NEON
    return neon_kernel_impl();  // Advanced SIMD is mandatory on AArch64.
#else
    return nullptr;
#endif
}

std::vector<const MinPlusKernel*> available_kernels() {
    std::vector<const MinPlusKernel*> ks{&scalar_kernel()};
    if (auto* k = avx2_kernel()) ks.push_back(k);
    if (auto* k = neon_kernel()) ks.push_back(k);
    return ks;
}

const MinPlusKernel& best_kernel() {
    static const MinPlusKernel* chosen = [] {
        const char* forced = std::getenv("RPT_KERNEL");
        if (forced != nullptr && *forced != '\0') {
            for (auto* k : available_kernels())
                if (std::string_view(k->name) == forced) return k;
            throw ValidationError(std::string("RPT_KERNEL=") + forced + " is not available");
        }
        auto ks = available_kernels();
        return ks.back();
    }();
    return *chosen;
}

}  // namespace rpt::kernels
