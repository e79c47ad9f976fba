// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "vtc/error.hpp"

// Little-endian primitives shared by the dump and sequence formats.

namespace vtc::binary {

inline std::uint32_t byteswap32(std::uint32_t v) noexcept {
    return ((v & 0x000000FFu) << 24) | ((v & 0x0000FF00u) << 8) | ((v & 0x00FF0000u) >> 8) | ((v & 0xFF000000u) >> 24);
}

inline std::uint32_t to_le(std::uint32_t v) noexcept {
    if constexpr (std::endian::native == std::endian::big) return byteswap32(v);
    return v;
}

class Writer {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        m_buf.insert(m_buf.end(), p, p + n);
    }
    void u8(std::uint8_t v) { m_buf.push_back(v); }
    void u32(std::uint32_t v) {
        v = to_le(v);
        bytes(&v, sizeof v);
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f32s(std::span<const float> values) {
        if constexpr (std::endian::native == std::endian::little) {
            bytes(values.data(), values.size_bytes());
        } else {
            for (float v : values) f32(v);
        }
    }

    const std::vector<std::uint8_t>& buffer() const noexcept { return m_buf; }
    std::vector<std::uint8_t> take() noexcept { return std::move(m_buf); }

private:
    std::vector<std::uint8_t> m_buf;
};

/// Bounds-checked cursor. Running past the end raises truncated_payload at the
/// offset where the read started.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : m_data(data) {}

    std::uint64_t offset() const noexcept { return m_pos; }
    std::size_t remaining() const noexcept { return m_data.size() - m_pos; }

    void need(std::size_t n, const std::string& what) const {
        if (remaining() < n) {
            throw FormatError(FormatError::Kind::truncated_payload, m_pos,
                              "truncated payload at byte " + std::to_string(m_pos) + ": " + what + " needs " +
                                  std::to_string(n) + " bytes, " + std::to_string(remaining()) + " available");
        }
    }
    std::span<const std::uint8_t> bytes(std::size_t n, const std::string& what) {
        need(n, what);
        auto out = m_data.subspan(m_pos, n);
        m_pos += n;
        return out;
    }
    std::uint8_t u8(const std::string& what) { return bytes(1, what)[0]; }
    std::uint32_t u32(const std::string& what) {
        std::uint32_t v;
        std::memcpy(&v, bytes(4, what).data(), 4);
        return to_le(v);
    }
    float f32(const std::string& what) { return std::bit_cast<float>(u32(what)); }

private:
    std::span<const std::uint8_t> m_data;
    std::size_t m_pos = 0;
};

/// Multiplies sizes, returning max() on overflow so the caller reports truncation.
inline std::uint64_t checked_product(std::initializer_list<std::uint64_t> factors) noexcept {
    std::uint64_t out = 1;
    for (auto f : factors) {
        if (f != 0 && out > std::numeric_limits<std::uint64_t>::max() / f) return std::numeric_limits<std::uint64_t>::max();
        out *= f;
    }
    return out;
}

inline std::vector<std::uint8_t> read_all(std::istream& in) {
    std::vector<std::uint8_t> data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw FormatError(FormatError::Kind::io_failure, data.size(), "read failure");
    return data;
}

inline void write_all(std::ostream& out, std::span<const std::uint8_t> data) {
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw FormatError(FormatError::Kind::io_failure, 0, "write failure");
}

}  // namespace vtc::binary
