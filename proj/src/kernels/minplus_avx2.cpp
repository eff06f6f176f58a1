#include <immintrin.h>

#include <algorithm>

#include "rpt/kernels.hpp"

namespace rpt::kernels {

namespace {

void minplus_avx2(const std::int32_t* w, std::size_t stride, const std::int32_t* cost,
                  std::size_t rows, std::int32_t* out, std::size_t cols) {
    const __m256i inf = _mm256_set1_epi32(kInf);
    const std::size_t blocks = (cols + 7) / 8;
    for (std::size_t b = 0; b < stride / 8; ++b)
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + 8 * b), inf);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::int32_t c = cost[i];
        if (c >= kInf) continue;
        const __m256i cv = _mm256_set1_epi32(c);
        const std::int32_t* row = w + i * stride;
        for (std::size_t b = 0; b < blocks; ++b) {
            __m256i acc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(out + 8 * b));
            __m256i wv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + 8 * b));
            acc = _mm256_min_epi32(acc, _mm256_add_epi32(cv, wv));
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + 8 * b), acc);
        }
    }
    // Padding columns may hold sums; callers only read j < cols, clamp all.
    for (std::size_t b = 0; b < blocks; ++b) {
        __m256i acc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(out + 8 * b));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + 8 * b), _mm256_min_epi32(acc, inf));
    }
}

}  // namespace

const MinPlusKernel* avx2_kernel_impl() {
    static const MinPlusKernel k{"avx2", &minplus_avx2};
    return &k;
}

}  // namespace rpt::kernels
