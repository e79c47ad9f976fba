// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "vtc/error.hpp"

namespace vtc {

/// Height x width of a token lattice: a frame, a GAPool grid cell or a pooling window.
struct GridShape {
    std::uint32_t height = 1;
    std::uint32_t width = 1;

    constexpr std::size_t area() const noexcept { return std::size_t{height} * width; }
    friend constexpr bool operator==(const GridShape&, const GridShape&) = default;
};

inline std::string to_string(const GridShape& shape) {
    return std::to_string(shape.height) + "x" + std::to_string(shape.width);
}

/// Parses the "AxB" notation (e.g. "24x24", "3x4"). Both sides must be positive.
inline GridShape parse_grid_shape(std::string_view text, const std::string& what = "shape") {
    const auto sep = text.find_first_of("xX");
    auto bad = [&] {
        return ConfigError(what, what + ": expected AxB with positive integers, got '" + std::string(text) + "'");
    };
    if (sep == std::string_view::npos) throw bad();
    auto parse_part = [&](std::string_view part) {
        std::uint32_t value = 0;
        const auto* end = part.data() + part.size();
        auto [ptr, ec] = std::from_chars(part.data(), end, value);
        if (ec != std::errc{} || ptr != end || value == 0) throw bad();
        return value;
    };
    return GridShape{parse_part(text.substr(0, sep)), parse_part(text.substr(sep + 1))};
}

enum class SummaryPlacement : std::uint8_t { none = 0, head = 1, tail = 2 };

inline const char* to_string(SummaryPlacement placement) noexcept {
    switch (placement) {
        case SummaryPlacement::none: return "none";
        case SummaryPlacement::head: return "head";
        case SummaryPlacement::tail: return "tail";
    }
    return "unknown";
}

inline SummaryPlacement parse_placement(std::string_view text) {
    if (text == "none") return SummaryPlacement::none;
    if (text == "head") return SummaryPlacement::head;
    if (text == "tail") return SummaryPlacement::tail;
    throw ConfigError("summary_placement", "summary_placement: expected none|head|tail, got '" + std::string(text) + "'");
}

/// Position of a visual token. All indices are 0-based; `frame` counts across
/// the whole video (segment * F + frame-within-segment).
struct TokenIndex {
    std::uint32_t frame = 0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;

    /// Frame-major, row-major raster position.
    constexpr std::size_t flat(const GridShape& frame_shape) const noexcept {
        return (std::size_t{frame} * frame_shape.height + row) * frame_shape.width + col;
    }
    friend constexpr bool operator==(const TokenIndex&, const TokenIndex&) = default;
    friend constexpr auto operator<=>(const TokenIndex&, const TokenIndex&) = default;
};

/// Shape of the summary branch output.
struct SummaryShape {
    GridShape frame_summary;    // H_S x W_S
    GridShape receptive_field;  // P_h x P_w in original tokens

    friend constexpr bool operator==(const SummaryShape&, const SummaryShape&) = default;
};

/// All hyper-parameters of the compression pipeline.
///
/// The number of segments equals the grid area g = G_h * G_w, so the merged
/// sequence spans T = g * F frames and always holds F * H * W compressed tokens.
struct PipelineConfig {
    GridShape frame_shape{24, 24};
    std::uint32_t segment_len = 5;
    GridShape grid{2, 2};
    std::optional<GridShape> pool;
    SummaryPlacement summary_placement = SummaryPlacement::none;
    std::uint32_t attn_layer = 3;
    std::uint32_t embed_dim = 1;

    std::uint32_t segments() const noexcept { return grid.height * grid.width; }
    std::uint32_t total_frames() const noexcept { return segments() * segment_len; }
    std::size_t tokens_per_frame() const noexcept { return frame_shape.area(); }
    std::size_t tokens_per_segment() const noexcept { return std::size_t{segment_len} * frame_shape.area(); }

    /// H_G x W_G: number of grid cells along each axis of a frame.
    GridShape compressed_frame() const noexcept {
        return {frame_shape.height / grid.height, frame_shape.width / grid.width};
    }

    /// Throws ConfigError naming the first failing dimension.
    void validate() const {
        auto require_positive = [](std::uint32_t value, const char* name) {
            if (value == 0) throw ConfigError(name, std::string(name) + " must be positive");
        };
        require_positive(frame_shape.height, "frame_shape.height");
        require_positive(frame_shape.width, "frame_shape.width");
        require_positive(segment_len, "segment_len");
        require_positive(grid.height, "grid.height");
        require_positive(grid.width, "grid.width");
        require_positive(attn_layer, "attn_layer");
        require_positive(embed_dim, "embed_dim");

        if (frame_shape.height % grid.height != 0) {
            throw ConfigError("grid.height", "grid.height: frame height " + std::to_string(frame_shape.height) +
                                                 " is not divisible by grid height " + std::to_string(grid.height));
        }
        if (frame_shape.width % grid.width != 0) {
            throw ConfigError("grid.width", "grid.width: frame width " + std::to_string(frame_shape.width) +
                                                " is not divisible by grid width " + std::to_string(grid.width));
        }
        if (pool) {
            require_positive(pool->height, "pool.height");
            require_positive(pool->width, "pool.width");
            const auto compressed = compressed_frame();
            if (compressed.height % pool->height != 0) {
                throw ConfigError("pool.height", "pool.height: compressed frame height " +
                                                     std::to_string(compressed.height) +
                                                     " is not divisible by pool height " + std::to_string(pool->height));
            }
            if (compressed.width % pool->width != 0) {
                throw ConfigError("pool.width", "pool.width: compressed frame width " +
                                                    std::to_string(compressed.width) +
                                                    " is not divisible by pool width " + std::to_string(pool->width));
            }
        }
        if (summary_placement != SummaryPlacement::none && !pool) {
            throw ConfigError("summary_placement", std::string("summary_placement: '") + to_string(summary_placement) +
                                                       "' requires a pooling size");
        }
    }

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Token-count and receptive-field bookkeeping for one configuration.
/// `summary_count` counts emitted summary tokens, so it is 0 unless a pool is
/// configured and the placement is head or tail.
struct Accounting {
    std::size_t compressed_count = 0;
    std::size_t summary_count = 0;
    std::uint32_t total_frames = 0;
    std::optional<SummaryShape> summary;  // absent when pooling is disabled

    std::size_t total() const noexcept { return compressed_count + summary_count; }
    friend bool operator==(const Accounting&, const Accounting&) = default;
};

inline SummaryShape summary_shape(const GridShape& compressed_frame, const GridShape& grid, const GridShape& pool) {
    return SummaryShape{
        GridShape{compressed_frame.height / pool.height, compressed_frame.width / pool.width},
        GridShape{grid.height * pool.height, grid.width * pool.width},
    };
}

inline Accounting derive_accounting(const PipelineConfig& config) {
    config.validate();
    Accounting acc;
    acc.total_frames = config.total_frames();
    acc.compressed_count = std::size_t{acc.total_frames} * config.compressed_frame().area();
    if (config.pool) {
        acc.summary = summary_shape(config.compressed_frame(), config.grid, *config.pool);
        if (config.summary_placement != SummaryPlacement::none) {
            acc.summary_count = std::size_t{acc.total_frames} * acc.summary->frame_summary.area();
        }
    }
    return acc;
}

}  // namespace vtc
