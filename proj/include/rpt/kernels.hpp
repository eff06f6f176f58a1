#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rpt::kernels {

inline constexpr std::int32_t kInf = 1 << 29;

// One min-plus layer: out[j] = min(kInf, min_i cost[i] + w[i * stride + j])
// for j < cols. `stride` is a multiple of 8 and `out` holds `stride` entries.
// Entries of w and cost lie in [0, kInf].
using MinPlusFn = void (*)(const std::int32_t* w, std::size_t stride, const std::int32_t* cost,
                           std::size_t rows, std::int32_t* out, std::size_t cols);

struct MinPlusKernel {
    const char* name;
    MinPlusFn fn;
};

const MinPlusKernel& scalar_kernel();
// Null when not compiled in or not supported by the running CPU.
const MinPlusKernel* avx2_kernel();
const MinPlusKernel* neon_kernel();

// Fastest supported kernel; RPT_KERNEL=scalar|avx2|neon overrides.
const MinPlusKernel& best_kernel();
std::vector<const MinPlusKernel*> available_kernels();

inline std::size_t padded(std::size_t n) { return (n + 7) & ~std::size_t{7}; }

}  // namespace rpt::kernels
