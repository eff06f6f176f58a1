#include <algorithm>

#include "rpt/kernels.hpp"

namespace rpt::kernels {

namespace {

void minplus_scalar(const std::int32_t* w, std::size_t stride, const std::int32_t* cost,
                    std::size_t rows, std::int32_t* out, std::size_t cols) {
    std::fill(out, out + stride, kInf);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::int32_t c = cost[i];
        if (c >= kInf) continue;
        const std::int32_t* row = w + i * stride;
        for (std::size_t j = 0; j < cols; ++j) out[j] = std::min(out[j], c + row[j]);
    }
    for (std::size_t j = 0; j < cols; ++j) out[j] = std::min(out[j], kInf);
}

}  // namespace

const MinPlusKernel& scalar_kernel() {
    static const MinPlusKernel k{"scalar", &minplus_scalar};
    return k;
}

}  // namespace rpt::kernels
