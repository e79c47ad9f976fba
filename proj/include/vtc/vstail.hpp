// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vtc/config.hpp"

namespace vtc {

/// Merged stage-one output laid out as frames x H_G x W_G x D.
struct CompressedGridView {
    std::uint32_t frames = 0;
    GridShape shape;  // H_G x W_G
    std::uint32_t dim = 0;
    std::span<const float> embeddings;
};

struct SummaryToken {
    std::uint32_t frame = 0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    std::vector<float> embedding;

    friend bool operator==(const SummaryToken&, const SummaryToken&) = default;
};

struct SummarySequence {
    SummaryShape shape;
    std::vector<SummaryToken> tokens;  // ordered by (frame, row, col)

    friend bool operator==(const SummarySequence&, const SummarySequence&) = default;
};

/// Visual summarization tail: non-overlapping S_h x S_w average pooling inside
/// each compressed frame. Window sums run in raster order in double precision.
/// `source_grid` is the GAPool cell used upstream; it only feeds the reported
/// receptive field.
inline SummarySequence vstail_pool(const CompressedGridView& input, const GridShape& pool,
                                   const GridShape& source_grid = {1, 1}) {
    if (pool.height == 0 || pool.width == 0) throw ConfigError("pool", "pool dimensions must be positive");
    if (input.shape.height % pool.height != 0) {
        throw ConfigError("pool.height", "pool.height: compressed frame height " + std::to_string(input.shape.height) +
                                             " is not divisible by pool height " + std::to_string(pool.height));
    }
    if (input.shape.width % pool.width != 0) {
        throw ConfigError("pool.width", "pool.width: compressed frame width " + std::to_string(input.shape.width) +
                                            " is not divisible by pool width " + std::to_string(pool.width));
    }
    const std::size_t dim = input.dim;
    if (input.embeddings.size() != std::size_t{input.frames} * input.shape.area() * dim) {
        throw ConfigError("embeddings", "compressed embeddings have " + std::to_string(input.embeddings.size()) +
                                            " values, expected " +
                                            std::to_string(std::size_t{input.frames} * input.shape.area() * dim));
    }

    SummarySequence out;
    out.shape = summary_shape(input.shape, source_grid, pool);
    const auto& fs = out.shape.frame_summary;
    const double window = static_cast<double>(pool.area());
    out.tokens.reserve(std::size_t{input.frames} * fs.area());

    std::vector<double> acc(dim);
    for (std::uint32_t f = 0; f < input.frames; ++f) {
        for (std::uint32_t r = 0; r < fs.height; ++r) {
            for (std::uint32_t c = 0; c < fs.width; ++c) {
                std::fill(acc.begin(), acc.end(), 0.0);
                for (std::uint32_t p = 0; p < pool.height; ++p) {
                    for (std::uint32_t q = 0; q < pool.width; ++q) {
                        const std::size_t row = std::size_t{r} * pool.height + p;
                        const std::size_t col = std::size_t{c} * pool.width + q;
                        const std::size_t token = (std::size_t{f} * input.shape.height + row) * input.shape.width + col;
                        const float* e = input.embeddings.data() + token * dim;
                        for (std::size_t d = 0; d < dim; ++d) acc[d] += e[d];
                    }
                }
                SummaryToken token{f, r, c, std::vector<float>(dim)};
                for (std::size_t d = 0; d < dim; ++d) token.embedding[d] = static_cast<float>(acc[d] / window);
                out.tokens.push_back(std::move(token));
            }
        }
    }
    return out;
}

}  // namespace vtc
