#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "rpt/kernels.hpp"
#include "rpt/nfa.hpp"

namespace rpt {

struct DistanceResult {
    static constexpr std::uint64_t kInfinite = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t value = kInfinite;

    bool infinite() const { return value == kInfinite; }
    bool operator==(const DistanceResult&) const = default;
};

// Minimum number of substitutions turning u into a member of L(a) of the same
// length, by the layered min-plus program over the states of a.
DistanceResult hamming_distance(const Nfa& a, const Word& u,
                                const kernels::MinPlusKernel& kernel = kernels::best_kernel());

// Generalised layer program: layer i uses matrix `layer_matrix[i]` of
// `matrices`, each a states x stride block of weights in [0, kInf].
DistanceResult layered_distance(const Nfa& a, const std::vector<std::int32_t>& matrices,
                                std::size_t stride, const std::vector<std::uint32_t>& layer_matrix,
                                const kernels::MinPlusKernel& kernel = kernels::best_kernel());

}  // namespace rpt
