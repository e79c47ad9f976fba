// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vtc/config.hpp"
#include "vtc/dump.hpp"
#include "vtc/gapool.hpp"
#include "vtc/synthetic.hpp"

namespace vtc {

/// Per-frame distribution of a token selection. When several selections are
/// merged, counts are totals over `samples` selections of size k each.
struct BiasReport {
    std::size_t k = 0;
    std::uint32_t frames = 0;
    std::size_t samples = 0;
    std::vector<std::uint64_t> per_frame_counts;
    std::vector<double> per_frame_shares;

    double last_frame_share() const { return per_frame_shares.empty() ? 0.0 : per_frame_shares.back(); }

    friend bool operator==(const BiasReport&, const BiasReport&) = default;
};

namespace detail {

inline void refresh_shares(BiasReport& report) {
    const double total = static_cast<double>(report.k) * static_cast<double>(report.samples);
    report.per_frame_shares.assign(report.frames, 0.0);
    for (std::uint32_t f = 0; f < report.frames; ++f) {
        report.per_frame_shares[f] = total > 0 ? static_cast<double>(report.per_frame_counts[f]) / total : 0.0;
    }
}

}  // namespace detail

/// Counts how many selections fall in each frame of the segment.
inline BiasReport frame_concentration(const CompressedSegment& selection, std::uint32_t frames) {
    BiasReport report;
    report.k = selection.selections.size();
    report.frames = frames;
    report.samples = 1;
    report.per_frame_counts.assign(frames, 0);
    for (const auto& s : selection.selections) {
        if (s.index.frame >= frames) {
            throw ConfigError("frame", "selection frame " + std::to_string(s.index.frame) + " outside " +
                                           std::to_string(frames) + " frames");
        }
        ++report.per_frame_counts[s.index.frame];
    }
    detail::refresh_shares(report);
    return report;
}

/// Per-frame concentration of the global top-k tokens.
inline BiasReport tail_concentration(const SegmentView& seg, std::size_t k) {
    return frame_concentration(global_topk(seg, k), seg.frames);
}

/// Per-frame concentration of GAPool's selection (always N_G per frame).
inline BiasReport gapool_concentration(const SegmentView& seg, const GridShape& grid) {
    return frame_concentration(gapool_compress(seg, grid), seg.frames);
}

/// Adds `other` into `into`; both must share k and F.
inline void merge_reports(BiasReport& into, const BiasReport& other) {
    if (into.samples == 0) {
        into = other;
        return;
    }
    if (into.k != other.k || into.frames != other.frames) {
        throw ConfigError("k", "cannot merge bias reports with different k or frame counts");
    }
    for (std::uint32_t f = 0; f < into.frames; ++f) into.per_frame_counts[f] += other.per_frame_counts[f];
    into.samples += other.samples;
    detail::refresh_shares(into);
}

/// nullopt selects every segment of a dump.
using SegmentSelector = std::optional<std::uint32_t>;

struct HeatmapAggregate {
    std::uint32_t frames = 0;
    GridShape frame_shape;
    std::vector<double> mean_scores;  // F x H x W, raster order
    std::size_t sample_count = 0;     // dumps aggregated
    std::size_t segment_count = 0;    // segments averaged over

    double at(std::uint32_t frame, std::uint32_t row, std::uint32_t col) const {
        return mean_scores[TokenIndex{frame, row, col}.flat(frame_shape)];
    }
};

/// Running double-precision sum of segment attention maps. Shards built on
/// disjoint dump subsets combine with merge() before finalize().
class HeatmapAccumulator {
public:
    void add(const TokenDump& dump, SegmentSelector selector = std::nullopt) {
        if (m_dumps == 0 && m_sums.empty()) {
            m_frames = dump.frames;
            m_shape = dump.frame_shape;
            m_sums.assign(dump.tokens_per_segment(), 0.0);
        } else if (dump.frames != m_frames || dump.frame_shape != m_shape) {
            throw ConfigError("shape", "heatmap inputs disagree on (F, H, W): expected (" + std::to_string(m_frames) +
                                           ", " + to_string(m_shape) + "), got (" + std::to_string(dump.frames) +
                                           ", " + to_string(dump.frame_shape) + ")");
        }
        const std::uint32_t first = selector ? *selector : 0;
        const std::uint32_t last = selector ? *selector + 1 : dump.segments;
        for (std::uint32_t s = first; s < last; ++s) {
            const auto att = dump.segment(s).attention;
            for (std::size_t i = 0; i < att.size(); ++i) m_sums[i] += att[i];
            ++m_segments;
        }
        ++m_dumps;
    }

    void merge(const HeatmapAccumulator& other) {
        if (other.m_sums.empty()) return;
        if (m_sums.empty()) {
            *this = other;
            return;
        }
        if (other.m_frames != m_frames || other.m_shape != m_shape) {
            throw ConfigError("shape", "cannot merge heatmap shards with different shapes");
        }
        for (std::size_t i = 0; i < m_sums.size(); ++i) m_sums[i] += other.m_sums[i];
        m_dumps += other.m_dumps;
        m_segments += other.m_segments;
    }

    HeatmapAggregate finalize() const {
        if (m_segments == 0) throw ConfigError("dumps", "heatmap aggregation needs at least one dump");
        HeatmapAggregate out{m_frames, m_shape, std::vector<double>(m_sums.size()), m_dumps, m_segments};
        for (std::size_t i = 0; i < m_sums.size(); ++i) out.mean_scores[i] = m_sums[i] / static_cast<double>(m_segments);
        return out;
    }

private:
    std::uint32_t m_frames = 0;
    GridShape m_shape;
    std::vector<double> m_sums;
    std::size_t m_dumps = 0;
    std::size_t m_segments = 0;
};

/// Position-wise mean attention over the selected segments of every dump,
/// accumulated in input order.
inline HeatmapAggregate aggregate_heatmap(std::span<const TokenDump> dumps, SegmentSelector selector = std::nullopt) {
    if (dumps.empty()) throw ConfigError("dumps", "heatmap aggregation needs at least one dump");
    HeatmapAccumulator acc;
    for (const auto& d : dumps) acc.add(d, selector);
    return acc.finalize();
}

/// Mean last-frame share of the global top-k over one synthetic segment per
/// seed. The content field of every seed is drawn once; only the positional
/// gain is recomputed per strength.
class TailShareProbe {
public:
    TailShareProbe(const PipelineConfig& config, double sharpness, std::size_t k, std::span<const std::uint64_t> seeds)
        : m_frames(config.segment_len), m_frame_shape(config.frame_shape), m_sharpness(sharpness), m_k(k) {
        config.validate();
        const std::size_t n = config.tokens_per_segment();
        if (k == 0 || k > n) throw ConfigError("k", "k must be in [1, " + std::to_string(n) + "]");
        m_fields.reserve(seeds.size());
        for (const auto seed : seeds) {
            std::vector<double> u(n);
            for (std::size_t flat = 0; flat < n; ++flat) {
                SplitMix64 rng(synthetic_stream_key(seed, 0, flat));
                u[flat] = rng.unit_open_closed();
            }
            m_fields.push_back(std::move(u));
        }
    }

    double mean_last_frame_share(double strength) const {
        const std::size_t n = m_frames * m_frame_shape.area();
        const SyntheticBiasParams params{0, strength, m_sharpness};
        std::vector<float> scores(n);
        const std::vector<float> no_embeddings(n);
        double total = 0.0;
        for (const auto& u : m_fields) {
            for (std::size_t flat = 0; flat < n; ++flat) scores[flat] = biased_score(u[flat], relative_position(flat, n), params);
            const SegmentView view{m_frames, m_frame_shape, 1, scores, no_embeddings};
            total += tail_concentration(view, m_k).last_frame_share();
        }
        return m_fields.empty() ? 0.0 : total / static_cast<double>(m_fields.size());
    }

private:
    std::uint32_t m_frames;
    GridShape m_frame_shape;
    double m_sharpness;
    std::size_t m_k;
    std::vector<std::vector<double>> m_fields;
};

/// `count` well-separated seeds (SplitMix64 outputs from `base`). Consecutive
/// small seeds share most per-token streams because keys are XOR-combined.
inline std::vector<std::uint64_t> spread_seeds(std::uint64_t base, std::size_t count) {
    SplitMix64 rng(base);
    std::vector<std::uint64_t> out(count);
    for (auto& s : out) s = rng.next();
    return out;
}

/// Bisects the bias strength so the mean last-frame share of the global
/// top-k hits `target` (requires the share to be reachable in [0, max_strength]).
inline double calibrate_bias_strength(const TailShareProbe& probe, double target, double max_strength = 1.0e4,
                                      int iterations = 60) {
    double lo = 0.0, hi = max_strength;
    if (probe.mean_last_frame_share(lo) > target || probe.mean_last_frame_share(hi) < target) {
        throw ConfigError("target", "target share not reachable within [0, " + std::to_string(max_strength) + "]");
    }
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        (probe.mean_last_frame_share(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace vtc
