#include "rpt/distance.hpp"

#include <algorithm>

namespace rpt {

using kernels::kInf;

DistanceResult layered_distance(const Nfa& a, const std::vector<std::int32_t>& matrices,
                                std::size_t stride, const std::vector<std::uint32_t>& layer_matrix,
                                const kernels::MinPlusKernel& kernel) {
    const std::size_t m = a.state_count();
    if (layer_matrix.size() >= static_cast<std::size_t>(kInf))
        throw ValidationError("word too long for the distance program");
    std::vector<std::int32_t> cost(stride, kInf), next(stride, kInf);
    cost[a.initial()] = 0;
    for (std::uint32_t idx : layer_matrix) {
        kernel.fn(matrices.data() + static_cast<std::size_t>(idx) * m * stride, stride, cost.data(), m,
                  next.data(), m);
        std::swap(cost, next);
    }
    std::int32_t best = kInf;
    for (State f : a.finals()) best = std::min(best, cost[f]);
    if (best >= kInf) return {};
    return {static_cast<std::uint64_t>(best)};
}

DistanceResult hamming_distance(const Nfa& a, const Word& u, const kernels::MinPlusKernel& kernel) {
    const std::size_t m = a.state_count();
    const std::size_t stride = kernels::padded(m);
    const std::size_t k = a.alphabet_size();
    // One matrix per letter x: 0 on x-edges, 1 on edges carrying another letter.
    std::vector<std::int32_t> mats(k * m * stride, kInf);
    for (std::size_t x = 0; x < k; ++x) {
        std::int32_t* w = mats.data() + x * m * stride;
        for (const auto& t : a.transitions()) {
            std::int32_t& cell = w[t.from * stride + t.to];
            cell = std::min(cell, t.symbol == x ? 0 : 1);
        }
    }
    std::vector<std::uint32_t> layers(u.begin(), u.end());
    for (auto x : layers)
        if (x >= k) throw ValidationError("word letter outside the alphabet");
    return layered_distance(a, mats, stride, layers, kernel);
}

}  // namespace rpt
