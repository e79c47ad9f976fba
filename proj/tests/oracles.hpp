// SPDX-License-Identifier: Apache-2.0
#pragma once

// Test-only reference implementations. They deliberately avoid the engine's
// code paths: per-token bucketing instead of per-cell scans, full stable sorts
// instead of partial selection.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <tuple>
#include <vector>

#include "vtc/config.hpp"
#include "vtc/dump.hpp"

namespace vtc::oracle {

/// Winner flat positions of every grid cell, ordered by (frame, cell row, cell col).
inline std::vector<std::size_t> per_grid_max(std::span<const float> att, GridShape shape, GridShape grid) {
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::size_t> best;
    for (std::size_t flat = 0; flat < att.size(); ++flat) {
        const auto f = static_cast<std::uint32_t>(flat / shape.area());
        const auto r = static_cast<std::uint32_t>((flat % shape.area()) / shape.width);
        const auto c = static_cast<std::uint32_t>(flat % shape.width);
        const auto key = std::make_tuple(f, r / grid.height, c / grid.width);
        auto it = best.find(key);
        if (it == best.end()) {
            best.emplace(key, flat);
            continue;
        }
        const auto incumbent = it->second;
        // earliest in-cell row-major position wins ties
        const auto in_cell = [&](std::size_t p) {
            const auto pr = (p % shape.area()) / shape.width % grid.height;
            const auto pc = p % shape.width % grid.width;
            return pr * grid.width + pc;
        };
        if (att[flat] > att[incumbent] || (att[flat] == att[incumbent] && in_cell(flat) < in_cell(incumbent))) {
            it->second = flat;
        }
    }
    std::vector<std::size_t> out;
    for (const auto& [key, flat] : best) out.push_back(flat);
    return out;
}

/// Top-k flat positions via a full stable sort, returned ascending.
inline std::vector<std::size_t> full_sort_topk(std::span<const float> att, std::size_t k) {
    std::vector<std::size_t> idx(att.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return att[a] > att[b]; });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// Window means by scattering every compressed token into its summary bucket.
inline std::vector<double> scatter_mean_pool(std::span<const float> emb, std::uint32_t frames, GridShape shape,
                                             std::uint32_t dim, GridShape pool) {
    const std::uint32_t hs = shape.height / pool.height, ws = shape.width / pool.width;
    std::vector<double> sums(std::size_t{frames} * hs * ws * dim, 0.0);
    for (std::uint32_t f = 0; f < frames; ++f)
        for (std::uint32_t r = 0; r < shape.height; ++r)
            for (std::uint32_t c = 0; c < shape.width; ++c) {
                const std::size_t src = ((std::size_t{f} * shape.height + r) * shape.width + c) * dim;
                const std::size_t dst = ((std::size_t{f} * hs + r / pool.height) * ws + c / pool.width) * dim;
                for (std::uint32_t d = 0; d < dim; ++d) sums[dst + d] += emb[src + d];
            }
    for (auto& s : sums) s /= static_cast<double>(pool.area());
    return sums;
}

inline std::uint64_t fnv1a64(std::span<const std::uint8_t> data) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (auto b : data) h = (h ^ b) * 0x100000001B3ull;
    return h;
}

/// Random dump; `tie_levels` > 0 quantises scores to that many levels to force ties.
inline TokenDump random_dump(std::mt19937_64& rng, std::uint32_t g, std::uint32_t f, GridShape shape,
                             std::uint32_t dim, int tie_levels = 0) {
    TokenDump d;
    d.segments = g;
    d.frames = f;
    d.frame_shape = shape;
    d.dim = dim;
    std::uniform_real_distribution<float> score(0.0f, 1.0f);
    std::uniform_real_distribution<float> value(-4.0f, 4.0f);
    std::uniform_int_distribution<int> level(0, std::max(tie_levels - 1, 0));
    d.attention.resize(d.token_count());
    for (auto& a : d.attention) a = tie_levels > 0 ? static_cast<float>(level(rng)) / static_cast<float>(tie_levels) : score(rng);
    d.embeddings.resize(d.token_count() * dim);
    for (auto& e : d.embeddings) e = value(rng);
    return d;
}

}  // namespace vtc::oracle
