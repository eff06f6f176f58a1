#include <arm_neon.h>

#include "rpt/kernels.hpp"

namespace rpt::kernels {

namespace {

void minplus_neon(const std::int32_t* w, std::size_t stride, const std::int32_t* cost,
                  std::size_t rows, std::int32_t* out, std::size_t cols) {
    const int32x4_t inf = vdupq_n_s32(kInf);
    const std::size_t blocks = (cols + 3) / 4;
    for (std::size_t b = 0; b < stride / 4; ++b) vst1q_s32(out + 4 * b, inf);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::int32_t c = cost[i];
        if (c >= kInf) continue;
        const int32x4_t cv = vdupq_n_s32(c);
        const std::int32_t* row = w + i * stride;
        for (std::size_t b = 0; b < blocks; ++b) {
            int32x4_t acc = vld1q_s32(out + 4 * b);
            acc = vminq_s32(acc, vaddq_s32(cv, vld1q_s32(row + 4 * b)));
            vst1q_s32(out + 4 * b, acc);
        }
    }
    for (std::size_t b = 0; b < blocks; ++b) vst1q_s32(out + 4 * b, vminq_s32(vld1q_s32(out + 4 * b), inf));
}

}  // namespace

const MinPlusKernel* neon_kernel_impl() {
    static const MinPlusKernel k{"neon", &minplus_neon};
    return &k;
}

}  // namespace rpt::kernels
