// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "vtc/config.hpp"
#include "vtc/dump.hpp"

namespace vtc {

struct Selection {
    TokenIndex index;  // frame is relative to the segment
    float score = 0.0f;
    std::vector<float> embedding;

    friend bool operator==(const Selection&, const Selection&) = default;
};

/// Tokens kept from one segment, in ascending raster order.
struct CompressedSegment {
    std::uint32_t segment_index = 0;
    std::vector<Selection> selections;

    friend bool operator==(const CompressedSegment&, const CompressedSegment&) = default;
};

namespace detail {

inline void check_segment(const SegmentView& seg) {
    if (seg.attention.size() != seg.token_count()) {
        throw ConfigError("attention", "segment attention has " + std::to_string(seg.attention.size()) +
                                           " scores, expected " + std::to_string(seg.token_count()));
    }
    if (seg.embeddings.size() != seg.token_count() * seg.dim) {
        throw ConfigError("embeddings", "segment embeddings have " + std::to_string(seg.embeddings.size()) +
                                            " values, expected " + std::to_string(seg.token_count() * seg.dim));
    }
    for (std::size_t i = 0; i < seg.attention.size(); ++i) {
        if (!std::isfinite(seg.attention[i])) {
            throw ConfigError("attention", "attention score at flat position " + std::to_string(i) + " is not finite");
        }
    }
}

inline Selection make_selection(const SegmentView& seg, std::size_t flat) {
    const std::size_t n = seg.frame_shape.area();
    const auto frame = static_cast<std::uint32_t>(flat / n);
    const auto in_frame = flat % n;
    const auto emb = seg.embedding(flat);
    return Selection{
        TokenIndex{frame, static_cast<std::uint32_t>(in_frame / seg.frame_shape.width),
                   static_cast<std::uint32_t>(in_frame % seg.frame_shape.width)},
        seg.attention[flat],
        std::vector<float>(emb.begin(), emb.end()),
    };
}

}  // namespace detail

/// Gridded attention pooling: tiles every frame into G_h x G_w cells and keeps
/// the highest-scoring token of each cell. Output has F * H_G * W_G selections
/// ordered by (frame, grid row, grid col); ties go to the first token in the
/// cell's row-major order.
inline CompressedSegment gapool_compress(const SegmentView& seg, const GridShape& grid, std::uint32_t segment_index = 0) {
    if (grid.height == 0 || grid.width == 0) throw ConfigError("grid", "grid dimensions must be positive");
    if (seg.frame_shape.height % grid.height != 0) {
        throw ConfigError("grid.height", "grid.height: frame height " + std::to_string(seg.frame_shape.height) +
                                             " is not divisible by grid height " + std::to_string(grid.height));
    }
    if (seg.frame_shape.width % grid.width != 0) {
        throw ConfigError("grid.width", "grid.width: frame width " + std::to_string(seg.frame_shape.width) +
                                            " is not divisible by grid width " + std::to_string(grid.width));
    }
    detail::check_segment(seg);

    const std::uint32_t cells_h = seg.frame_shape.height / grid.height;
    const std::uint32_t cells_w = seg.frame_shape.width / grid.width;
    const std::size_t width = seg.frame_shape.width;
    const std::size_t frame_size = seg.frame_shape.area();

    CompressedSegment out;
    out.segment_index = segment_index;
    out.selections.reserve(std::size_t{seg.frames} * cells_h * cells_w);
    for (std::uint32_t f = 0; f < seg.frames; ++f) {
        const float* frame = seg.attention.data() + f * frame_size;
        for (std::uint32_t i = 0; i < cells_h; ++i) {
            for (std::uint32_t j = 0; j < cells_w; ++j) {
                std::size_t best = (std::size_t{i} * grid.height) * width + std::size_t{j} * grid.width;
                for (std::uint32_t p = 0; p < grid.height; ++p) {
                    const std::size_t row_start = (std::size_t{i} * grid.height + p) * width + std::size_t{j} * grid.width;
                    for (std::uint32_t q = 0; q < grid.width; ++q) {
                        // strict > keeps the earliest maximum
                        if (frame[row_start + q] > frame[best]) best = row_start + q;
                    }
                }
                out.selections.push_back(detail::make_selection(seg, f * frame_size + best));
            }
        }
    }
    return out;
}

/// GlobalAttn baseline: the k highest-scoring tokens of the segment, ties to
/// the smaller flat position, returned in raster order.
inline CompressedSegment global_topk(const SegmentView& seg, std::size_t k, std::uint32_t segment_index = 0) {
    detail::check_segment(seg);
    const std::size_t n = seg.token_count();
    if (k == 0 || k > n) {
        throw ConfigError("k", "k must be in [1, " + std::to_string(n) + "], got " + std::to_string(k));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto ranks_before = [&](std::size_t a, std::size_t b) {
        const float sa = seg.attention[a], sb = seg.attention[b];
        return sa > sb || (sa == sb && a < b);
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), ranks_before);
    order.resize(k);
    std::sort(order.begin(), order.end());

    CompressedSegment out;
    out.segment_index = segment_index;
    out.selections.reserve(k);
    for (auto flat : order) out.selections.push_back(detail::make_selection(seg, flat));
    return out;
}

}  // namespace vtc
