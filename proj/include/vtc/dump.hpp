// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vtc/config.hpp"
#include "vtc/error.hpp"

namespace vtc {

/// Read-only view of one segment: F x H x W attention scores and
/// F x H x W x D embeddings, both in (frame, row, col[, dim]) raster order.
struct SegmentView {
    std::uint32_t frames = 0;
    GridShape frame_shape;
    std::uint32_t dim = 0;
    std::span<const float> attention;
    std::span<const float> embeddings;

    std::size_t token_count() const noexcept { return std::size_t{frames} * frame_shape.area(); }

    std::span<const float> embedding(std::size_t flat) const noexcept {
        return embeddings.subspan(flat * dim, dim);
    }
};

/// Per-video attention and embedding payload consumed by the engine.
struct TokenDump {
    std::uint32_t segments = 1;  // g
    std::uint32_t frames = 1;    // F, frames per segment
    GridShape frame_shape{1, 1};
    std::uint32_t dim = 1;       // D
    bool post_softmax = false;   // exporter convention, carried through unchanged
    std::vector<float> attention;   // g*F*H*W, order (seg, frame, row, col)
    std::vector<float> embeddings;  // g*F*H*W*D, order (seg, frame, row, col, dim)

    std::size_t tokens_per_segment() const noexcept { return std::size_t{frames} * frame_shape.area(); }
    std::size_t token_count() const noexcept { return std::size_t{segments} * tokens_per_segment(); }

    SegmentView segment(std::uint32_t index) const {
        if (index >= segments) {
            throw ConfigError("segment", "segment index " + std::to_string(index) + " out of range (g=" +
                                             std::to_string(segments) + ")");
        }
        const std::size_t n = tokens_per_segment();
        return SegmentView{
            frames,
            frame_shape,
            dim,
            std::span<const float>(attention).subspan(index * n, n),
            std::span<const float>(embeddings).subspan(index * n * dim, n * dim),
        };
    }

    /// Throws FormatError (offset 0) if the in-memory dump breaks an invariant.
    void validate() const {
        if (segments == 0 || frames == 0 || frame_shape.height == 0 || frame_shape.width == 0 || dim == 0) {
            throw FormatError(FormatError::Kind::shape_mismatch, 0, "dump dimensions must all be positive");
        }
        if (attention.size() != token_count()) {
            throw FormatError(FormatError::Kind::shape_mismatch, 0,
                              "attention length " + std::to_string(attention.size()) + " != g*F*H*W = " +
                                  std::to_string(token_count()));
        }
        if (embeddings.size() != token_count() * dim) {
            throw FormatError(FormatError::Kind::shape_mismatch, 0,
                              "embedding length " + std::to_string(embeddings.size()) + " != g*F*H*W*D = " +
                                  std::to_string(token_count() * dim));
        }
        for (std::size_t i = 0; i < attention.size(); ++i) {
            if (!std::isfinite(attention[i])) {
                throw FormatError(FormatError::Kind::non_finite, 0, "attention[" + std::to_string(i) + "] is not finite");
            }
            if (attention[i] < 0.0f) {
                throw FormatError(FormatError::Kind::negative_score, 0, "attention[" + std::to_string(i) + "] is negative");
            }
        }
        for (std::size_t i = 0; i < embeddings.size(); ++i) {
            if (!std::isfinite(embeddings[i])) {
                throw FormatError(FormatError::Kind::non_finite, 0, "embeddings[" + std::to_string(i) + "] is not finite");
            }
        }
    }

    /// Throws ConfigError if this dump cannot be processed under `config`.
    void check_matches(const PipelineConfig& config) const {
        auto mismatch = [](const char* field, std::uint32_t dump_value, std::uint32_t config_value) {
            return ConfigError(field, std::string(field) + ": dump has " + std::to_string(dump_value) +
                                          ", configuration expects " + std::to_string(config_value));
        };
        if (segments != config.segments()) throw mismatch("g", segments, config.segments());
        if (frames != config.segment_len) throw mismatch("F", frames, config.segment_len);
        if (frame_shape.height != config.frame_shape.height) throw mismatch("H", frame_shape.height, config.frame_shape.height);
        if (frame_shape.width != config.frame_shape.width) throw mismatch("W", frame_shape.width, config.frame_shape.width);
        if (dim != config.embed_dim) throw mismatch("D", dim, config.embed_dim);
    }

    friend bool operator==(const TokenDump&, const TokenDump&) = default;
};

}  // namespace vtc
