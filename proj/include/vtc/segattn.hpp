// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <iterator>
#include <thread>
#include <vector>

#include "vtc/config.hpp"
#include "vtc/dump.hpp"
#include "vtc/gapool.hpp"
#include "vtc/vstail.hpp"

namespace vtc {

enum class TokenOrigin : std::uint8_t { compressed = 0, summary = 1 };

/// One entry of the LLM-ready visual sequence. For compressed tokens the
/// coordinates are the original (video frame, row, col); for summary tokens
/// they are (video frame, summary row, summary col).
struct SequenceToken {
    TokenOrigin origin = TokenOrigin::compressed;
    std::uint32_t frame = 0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    std::vector<float> embedding;

    friend bool operator==(const SequenceToken&, const SequenceToken&) = default;
};

struct FinalSequence {
    PipelineConfig config;
    std::size_t compressed_count = 0;
    std::size_t summary_count = 0;
    std::vector<SequenceToken> tokens;

    friend bool operator==(const FinalSequence&, const FinalSequence&) = default;
};

namespace detail {

inline void check_pipeline_inputs(const TokenDump& dump, const PipelineConfig& config) {
    config.validate();
    dump.check_matches(config);
    dump.validate();
}

/// Stage two: concatenate segments in temporal order, then pool and place the summary.
inline FinalSequence assemble(const PipelineConfig& config, const std::vector<CompressedSegment>& segments) {
    const auto acc = derive_accounting(config);
    FinalSequence seq;
    seq.config = config;
    seq.compressed_count = acc.compressed_count;
    seq.summary_count = acc.summary_count;

    std::vector<SequenceToken> compressed;
    compressed.reserve(acc.compressed_count);
    for (const auto& seg : segments) {
        const std::uint32_t frame_offset = seg.segment_index * config.segment_len;
        for (const auto& sel : seg.selections) {
            compressed.push_back(SequenceToken{TokenOrigin::compressed, frame_offset + sel.index.frame, sel.index.row,
                                               sel.index.col, sel.embedding});
        }
    }

    std::vector<SequenceToken> summary;
    if (acc.summary_count > 0) {
        std::vector<float> merged;
        merged.reserve(compressed.size() * config.embed_dim);
        for (const auto& t : compressed) merged.insert(merged.end(), t.embedding.begin(), t.embedding.end());
        const CompressedGridView view{config.total_frames(), config.compressed_frame(), config.embed_dim, merged};
        auto pooled = vstail_pool(view, *config.pool, config.grid);
        summary.reserve(pooled.tokens.size());
        for (auto& t : pooled.tokens) {
            summary.push_back(SequenceToken{TokenOrigin::summary, t.frame, t.row, t.col, std::move(t.embedding)});
        }
    }

    seq.tokens.reserve(compressed.size() + summary.size());
    auto append = [&](std::vector<SequenceToken>& part) {
        std::move(part.begin(), part.end(), std::back_inserter(seq.tokens));
    };
    if (config.summary_placement == SummaryPlacement::head) append(summary);
    append(compressed);
    if (config.summary_placement == SummaryPlacement::tail) append(summary);
    return seq;
}

}  // namespace detail

/// Two-stage compression with sequential stage one.
inline FinalSequence run_pipeline(const TokenDump& dump, const PipelineConfig& config) {
    detail::check_pipeline_inputs(dump, config);
    std::vector<CompressedSegment> segments;
    segments.reserve(dump.segments);
    for (std::uint32_t s = 0; s < dump.segments; ++s) {
        segments.push_back(gapool_compress(dump.segment(s), config.grid, s));
    }
    return detail::assemble(config, segments);
}

/// Stage one spread over `workers` threads. Every segment writes its own slot
/// and the merge runs after all workers join, so the result is identical to
/// run_pipeline for any worker count.
inline FinalSequence run_pipeline_parallel(const TokenDump& dump, const PipelineConfig& config, unsigned workers) {
    if (workers == 0) throw ConfigError("workers", "workers must be positive");
    detail::check_pipeline_inputs(dump, config);

    const std::uint32_t g = dump.segments;
    std::vector<CompressedSegment> segments(g);
    std::vector<std::exception_ptr> errors(g);
    std::atomic<std::uint32_t> next{0};
    auto work = [&] {
        for (std::uint32_t s = next.fetch_add(1); s < g; s = next.fetch_add(1)) {
            try {
                segments[s] = gapool_compress(dump.segment(s), config.grid, s);
            } catch (...) {
                errors[s] = std::current_exception();
            }
        }
    };

    const unsigned threads = std::min<unsigned>(workers, g);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads > 0 ? threads - 1 : 0);
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
        work();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return detail::assemble(config, segments);
}

}  // namespace vtc
