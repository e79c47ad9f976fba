// SPDX-License-Identifier: Apache-2.0
#pragma once

// VTSQ1 final-sequence format, little-endian, no padding:
//
//   magic "VTSQ" | version u32 = 1
//   g, F, H, W, D, G_h, G_w, S_h, S_w   u32 each (S_h = S_w = 0 when pooling is off)
//   placement u8 (0 none, 1 head, 2 tail)
//   compressed_count u32 | summary_count u32
//   per token: origin u8 (0 compressed, 1 summary) | frame, row, col u32 | D x f32
//
// The layer index is not part of the format; decoded configs carry the default.

#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "vtc/binary.hpp"
#include "vtc/segattn.hpp"

namespace vtc {

inline constexpr std::array<std::uint8_t, 4> kSequenceMagic{'V', 'T', 'S', 'Q'};
inline constexpr std::uint32_t kSequenceVersion = 1;

inline std::vector<std::uint8_t> encode_sequence(const FinalSequence& seq) {
    const auto& c = seq.config;
    binary::Writer w;
    w.bytes(kSequenceMagic.data(), kSequenceMagic.size());
    w.u32(kSequenceVersion);
    for (auto v : {c.segments(), c.segment_len, c.frame_shape.height, c.frame_shape.width, c.embed_dim, c.grid.height,
                   c.grid.width, c.pool ? c.pool->height : 0u, c.pool ? c.pool->width : 0u}) {
        w.u32(v);
    }
    w.u8(static_cast<std::uint8_t>(c.summary_placement));
    w.u32(static_cast<std::uint32_t>(seq.compressed_count));
    w.u32(static_cast<std::uint32_t>(seq.summary_count));
    for (const auto& t : seq.tokens) {
        if (t.embedding.size() != c.embed_dim) {
            throw FormatError(FormatError::Kind::shape_mismatch, w.buffer().size(), "token embedding length != D");
        }
        w.u8(static_cast<std::uint8_t>(t.origin));
        w.u32(t.frame);
        w.u32(t.row);
        w.u32(t.col);
        w.f32s(t.embedding);
    }
    return w.take();
}

inline FinalSequence decode_sequence(std::span<const std::uint8_t> data) {
    using Kind = FormatError::Kind;
    binary::Reader r(data);
    const auto magic = r.bytes(4, "magic");
    if (!std::equal(magic.begin(), magic.end(), kSequenceMagic.begin())) {
        throw FormatError(Kind::bad_magic, 0, "bad magic at byte 0: expected \"VTSQ\"");
    }
    if (const auto version = r.u32("version"); version != kSequenceVersion) {
        throw FormatError(Kind::version_mismatch, 4, "version mismatch at byte 4: got " + std::to_string(version));
    }
    std::uint32_t f[9];
    for (auto& v : f) v = r.u32("config echo");

    FinalSequence seq;
    auto& c = seq.config;
    c.segment_len = f[1];
    c.frame_shape = {f[2], f[3]};
    c.embed_dim = f[4];
    c.grid = {f[5], f[6]};
    if (f[7] != 0 || f[8] != 0) c.pool = GridShape{f[7], f[8]};
    const auto placement_offset = r.offset();
    const auto placement = r.u8("placement");
    if (placement > 2) {
        throw FormatError(Kind::reserved_bits, placement_offset, "invalid placement byte " + std::to_string(placement));
    }
    c.summary_placement = static_cast<SummaryPlacement>(placement);
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw FormatError(Kind::shape_mismatch, 8, std::string("invalid config echo: ") + e.what());
    }
    if (c.segments() != f[0]) {
        throw FormatError(Kind::shape_mismatch, 8, "config echo g=" + std::to_string(f[0]) + " != grid area");
    }
    const auto acc = derive_accounting(c);
    const auto counts_offset = r.offset();
    seq.compressed_count = r.u32("compressed_count");
    seq.summary_count = r.u32("summary_count");
    if (seq.compressed_count != acc.compressed_count || seq.summary_count != acc.summary_count) {
        throw FormatError(Kind::shape_mismatch, counts_offset, "token counts disagree with the config echo");
    }

    const std::size_t record = 13 + 4 * std::size_t{c.embed_dim};
    const std::size_t count = acc.total();
    if (r.remaining() < count * record) {
        throw FormatError(Kind::truncated_payload, data.size(),
                          "truncated payload: " + std::to_string(count) + " tokens need " +
                              std::to_string(count * record) + " bytes, " + std::to_string(r.remaining()) + " available");
    }
    if (r.remaining() > count * record) {
        throw FormatError(Kind::trailing_bytes, r.offset() + count * record, "unexpected trailing bytes");
    }
    seq.tokens.resize(count);
    for (auto& t : seq.tokens) {
        const auto offset = r.offset();
        const auto origin = r.u8("origin");
        if (origin > 1) throw FormatError(Kind::reserved_bits, offset, "invalid origin byte at " + std::to_string(offset));
        t.origin = static_cast<TokenOrigin>(origin);
        t.frame = r.u32("frame");
        t.row = r.u32("row");
        t.col = r.u32("col");
        t.embedding.resize(c.embed_dim);
        for (auto& v : t.embedding) {
            const auto voff = r.offset();
            v = r.f32("embedding");
            if (!std::isfinite(v)) throw FormatError(Kind::non_finite, voff, "non-finite embedding at byte " + std::to_string(voff));
        }
    }
    return seq;
}

inline FinalSequence load_sequence(std::istream& source) { return decode_sequence(binary::read_all(source)); }

inline void write_sequence(const FinalSequence& seq, std::ostream& sink) { binary::write_all(sink, encode_sequence(seq)); }

}  // namespace vtc
