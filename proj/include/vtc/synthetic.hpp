// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "vtc/config.hpp"
#include "vtc/dump.hpp"

namespace vtc {

/// SplitMix64 (Steele, Lea, Flood 2014). Bit-exact across platforms.
class SplitMix64 {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : m_state(state) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (m_state += kGolden);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1], 53-bit resolution.
    double unit_open_closed() noexcept { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform on (-1, 1), exactly representable as float (24-bit lattice, midpoints).
    float signed_unit() noexcept {
        const auto k = static_cast<std::int64_t>(next() >> 40);  // [0, 2^24)
        return static_cast<float>(2 * k + 1 - (std::int64_t{1} << 24)) * 0x1.0p-24f;
    }

private:
    std::uint64_t m_state;
};

/// Positional tail-bias model for synthetic attention:
///   score = u * (1 + strength * rho^sharpness)
/// with u uniform on (0, 1] and rho the relative position inside the segment.
struct SyntheticBiasParams {
    std::uint64_t seed = 0;
    double strength = 0.0;   // beta >= 0; 0 disables the positional term
    double sharpness = 1.0;  // gamma >= 1

    void validate() const {
        if (!(strength >= 0.0) || !std::isfinite(strength)) {
            throw ConfigError("beta", "beta must be finite and non-negative");
        }
        if (!(sharpness >= 1.0) || !std::isfinite(sharpness)) {
            throw ConfigError("gamma", "gamma must be finite and >= 1");
        }
    }
};

/// Stream key of one token: seed XOR (segment * golden + flat position within segment).
/// Seeds that differ only in low bits permute each other's streams, so
/// statistics over many dumps should use well-separated seeds.
constexpr std::uint64_t synthetic_stream_key(std::uint64_t seed, std::uint64_t segment, std::uint64_t flat) noexcept {
    return seed ^ (segment * SplitMix64::kGolden + flat);
}

/// Relative position of `flat` within a segment of `count` tokens, in [0, 1].
inline double relative_position(std::size_t flat, std::size_t count) noexcept {
    return count > 1 ? static_cast<double>(flat) / static_cast<double>(count - 1) : 0.0;
}

inline float biased_score(double u, double rho, const SyntheticBiasParams& params) noexcept {
    return static_cast<float>(u * (1.0 + params.strength * std::pow(rho, params.sharpness)));
}

/// Fills one segment. Each token owns a SplitMix64 stream: the first draw is the
/// content score u, the next D draws are its embedding components.
inline void synthesize_segment(const PipelineConfig& config, const SyntheticBiasParams& params, std::uint32_t segment,
                               std::span<float> attention, std::span<float> embeddings) {
    const std::size_t n = config.tokens_per_segment();
    const std::size_t dim = config.embed_dim;
    for (std::size_t flat = 0; flat < n; ++flat) {
        SplitMix64 rng(synthetic_stream_key(params.seed, segment, flat));
        attention[flat] = biased_score(rng.unit_open_closed(), relative_position(flat, n), params);
        for (std::size_t d = 0; d < dim; ++d) embeddings[flat * dim + d] = rng.signed_unit();
    }
}

/// Deterministic TokenDump for `config`. Segments are independent, so any
/// partition of the work yields the same bytes.
inline TokenDump synthesize(const PipelineConfig& config, const SyntheticBiasParams& params) {
    config.validate();
    params.validate();
    TokenDump dump;
    dump.segments = config.segments();
    dump.frames = config.segment_len;
    dump.frame_shape = config.frame_shape;
    dump.dim = config.embed_dim;
    dump.post_softmax = false;
    const std::size_t n = config.tokens_per_segment();
    dump.attention.resize(dump.token_count());
    dump.embeddings.resize(dump.token_count() * dump.dim);
    for (std::uint32_t s = 0; s < dump.segments; ++s) {
        synthesize_segment(config, params, s, std::span<float>(dump.attention).subspan(s * n, n),
                           std::span<float>(dump.embeddings).subspan(s * n * dump.dim, n * dump.dim));
    }
    return dump;
}

}  // namespace vtc
