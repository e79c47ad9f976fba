// SPDX-License-Identifier: Apache-2.0
#pragma once

// VTDK1 dump format, little-endian throughout:
//
//   offset  size  field
//   0       4     magic "VTDK"
//   4       4     version (u32) = 1
//   8       20    g, F, H, W, D (u32 each)
//   28      1     flags: bit 0 = attention is post-softmax, bits 1-7 reserved (0)
//   29      3     zero padding
//   32      4*gFHW     attention, f32, order (seg, frame, row, col)
//   ...     4*gFHWD    embeddings, f32, order (seg, frame, row, col, dim)
//
// The encoding is canonical: reserved bits, padding and trailing bytes are rejected.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <string>
#include <ostream>
#include <span>
#include <vector>

#include "vtc/binary.hpp"
#include "vtc/dump.hpp"

namespace vtc {

inline constexpr std::array<std::uint8_t, 4> kDumpMagic{'V', 'T', 'D', 'K'};
inline constexpr std::uint32_t kDumpVersion = 1;
inline constexpr std::size_t kDumpHeaderSize = 32;
inline constexpr std::uint8_t kDumpFlagPostSoftmax = 0x01;

inline std::vector<std::uint8_t> encode_dump(const TokenDump& dump) {
    dump.validate();
    binary::Writer w;
    w.bytes(kDumpMagic.data(), kDumpMagic.size());
    w.u32(kDumpVersion);
    w.u32(dump.segments);
    w.u32(dump.frames);
    w.u32(dump.frame_shape.height);
    w.u32(dump.frame_shape.width);
    w.u32(dump.dim);
    w.u8(dump.post_softmax ? kDumpFlagPostSoftmax : 0);
    w.u8(0);
    w.u8(0);
    w.u8(0);
    w.f32s(dump.attention);
    w.f32s(dump.embeddings);
    return w.take();
}

inline TokenDump decode_dump(std::span<const std::uint8_t> data) {
    using Kind = FormatError::Kind;
    binary::Reader r(data);

    const auto magic = r.bytes(4, "magic");
    if (!std::equal(magic.begin(), magic.end(), kDumpMagic.begin())) {
        throw FormatError(Kind::bad_magic, 0, "bad magic at byte 0: expected \"VTDK\"");
    }
    const auto version = r.u32("version");
    if (version != kDumpVersion) {
        throw FormatError(Kind::version_mismatch, 4,
                          "version mismatch at byte 4: expected 1, got " + std::to_string(version));
    }

    TokenDump dump;
    const char* names[] = {"g", "F", "H", "W", "D"};
    std::uint32_t dims[5];
    for (int i = 0; i < 5; ++i) {
        const auto offset = r.offset();
        dims[i] = r.u32(names[i]);
        if (dims[i] == 0) {
            throw FormatError(Kind::shape_mismatch, offset,
                              std::string("shape field ") + names[i] + " at byte " + std::to_string(offset) + " is zero");
        }
    }
    dump.segments = dims[0];
    dump.frames = dims[1];
    dump.frame_shape = GridShape{dims[2], dims[3]};
    dump.dim = dims[4];

    const auto flags = r.u8("flags");
    if ((flags & ~kDumpFlagPostSoftmax) != 0) {
        throw FormatError(Kind::reserved_bits, 28, "reserved flag bits set at byte 28");
    }
    dump.post_softmax = (flags & kDumpFlagPostSoftmax) != 0;
    for (int i = 0; i < 3; ++i) {
        const auto offset = r.offset();
        if (r.u8("padding") != 0) {
            throw FormatError(Kind::reserved_bits, offset, "non-zero padding at byte " + std::to_string(offset));
        }
    }

    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    const auto tokens = binary::checked_product({dims[0], dims[1], dims[2], dims[3]});
    const auto values = binary::checked_product({tokens, dims[4]});
    const bool overflow = tokens == kMax || values == kMax || tokens + values > kMax / 4;
    const std::uint64_t payload = overflow ? kMax : (tokens + values) * 4;
    if (payload > r.remaining()) {
        const auto end = r.offset() + r.remaining();
        throw FormatError(Kind::truncated_payload, end,
                          "truncated payload at byte " + std::to_string(end) + ": header declares " +
                              (overflow ? std::string("an unrepresentable") : std::to_string(payload)) +
                              " payload bytes, " + std::to_string(r.remaining()) + " available");
    }
    if (payload < r.remaining()) {
        throw FormatError(Kind::trailing_bytes, r.offset() + payload,
                          "unexpected trailing bytes after payload at byte " + std::to_string(r.offset() + payload));
    }

    dump.attention.resize(tokens);
    for (auto& v : dump.attention) {
        const auto offset = r.offset();
        v = r.f32("attention");
        if (!std::isfinite(v)) {
            throw FormatError(Kind::non_finite, offset, "non-finite attention value at byte " + std::to_string(offset));
        }
        if (v < 0.0f) {
            throw FormatError(Kind::negative_score, offset, "negative attention value at byte " + std::to_string(offset));
        }
    }
    dump.embeddings.resize(values);
    for (auto& v : dump.embeddings) {
        const auto offset = r.offset();
        v = r.f32("embedding");
        if (!std::isfinite(v)) {
            throw FormatError(Kind::non_finite, offset, "non-finite embedding value at byte " + std::to_string(offset));
        }
    }
    return dump;
}

inline TokenDump load_dump(std::istream& source) { return decode_dump(binary::read_all(source)); }

inline void write_dump(const TokenDump& dump, std::ostream& sink) { binary::write_all(sink, encode_dump(dump)); }

}  // namespace vtc
