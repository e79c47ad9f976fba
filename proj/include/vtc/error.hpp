// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vtc {

/// Invalid shape or hyper-parameter combination.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string dimension, const std::string& message)
        : std::invalid_argument(message), m_dimension(std::move(dimension)) {}

    /// Name of the dimension or field that failed validation (e.g. "grid.height").
    const std::string& dimension() const noexcept { return m_dimension; }

private:
    std::string m_dimension;
};

/// Parse failures for the binary dump and sequence formats.
class FormatError : public std::runtime_error {
public:
    enum class Kind {
        bad_magic,
        version_mismatch,
        truncated_payload,
        trailing_bytes,
        reserved_bits,
        non_finite,
        negative_score,
        shape_mismatch,
        io_failure,
    };

    FormatError(Kind kind, std::uint64_t offset, const std::string& message)
        : std::runtime_error(message), m_kind(kind), m_offset(offset) {}

    Kind kind() const noexcept { return m_kind; }
    /// Byte offset at which the problem was detected.
    std::uint64_t offset() const noexcept { return m_offset; }

private:
    Kind m_kind;
    std::uint64_t m_offset;
};

inline const char* to_string(FormatError::Kind kind) noexcept {
    switch (kind) {
        case FormatError::Kind::bad_magic: return "bad_magic";
        case FormatError::Kind::version_mismatch: return "version_mismatch";
        case FormatError::Kind::truncated_payload: return "truncated_payload";
        case FormatError::Kind::trailing_bytes: return "trailing_bytes";
        case FormatError::Kind::reserved_bits: return "reserved_bits";
        case FormatError::Kind::non_finite: return "non_finite";
        case FormatError::Kind::negative_score: return "negative_score";
        case FormatError::Kind::shape_mismatch: return "shape_mismatch";
        case FormatError::Kind::io_failure: return "io_failure";
    }
    return "unknown";
}

}  // namespace vtc
