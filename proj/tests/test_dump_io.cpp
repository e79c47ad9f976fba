// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vtc/dump_io.hpp"
#include "vtc/synthetic.hpp"

namespace {

using Kind = vtc::FormatError::Kind;

std::vector<std::uint8_t> header(std::uint32_t g, std::uint32_t f, std::uint32_t h, std::uint32_t w, std::uint32_t d,
                                 std::uint8_t flags = 0) {
    std::vector<std::uint8_t> out{'V', 'T', 'D', 'K'};
    for (std::uint32_t v : {1u, g, f, h, w, d}) {
        for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    }
    out.push_back(flags);
    out.insert(out.end(), 3, 0);
    return out;
}

void append_floats(std::vector<std::uint8_t>& out, std::initializer_list<float> values) {
    for (float v : values) {
        const auto bits = std::bit_cast<std::uint32_t>(v);
        for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
}

Kind decode_error(const std::vector<std::uint8_t>& bytes, std::uint64_t* offset = nullptr) {
    try {
        vtc::decode_dump(bytes);
    } catch (const vtc::FormatError& e) {
        if (offset) *offset = e.offset();
        return e.kind();
    }
    ADD_FAILURE() << "decode unexpectedly succeeded";
    return Kind::io_failure;
}

std::vector<std::uint8_t> smallest() {
    auto bytes = header(1, 1, 2, 2, 1);
    append_floats(bytes, {0.1f, 0.4f, 0.3f, 0.2f});
    append_floats(bytes, {-1.0f, 0.5f, 2.25f, 3.0f});
    return bytes;
}

TEST(DumpIo, SmallestLegalDumpIsBitExact) {
    const auto d = vtc::decode_dump(smallest());
    EXPECT_EQ(d.segments, 1u);
    EXPECT_EQ(d.frames, 1u);
    EXPECT_EQ(d.frame_shape, (vtc::GridShape{2, 2}));
    EXPECT_EQ(d.dim, 1u);
    EXPECT_FALSE(d.post_softmax);
    EXPECT_EQ(d.attention, (std::vector<float>{0.1f, 0.4f, 0.3f, 0.2f}));
    EXPECT_EQ(d.embeddings, (std::vector<float>{-1.0f, 0.5f, 2.25f, 3.0f}));
    EXPECT_EQ(vtc::encode_dump(d), smallest());
}

TEST(DumpIo, PostSoftmaxFlagRoundTrips) {
    auto bytes = smallest();
    bytes[28] = 1;
    const auto d = vtc::decode_dump(bytes);
    EXPECT_TRUE(d.post_softmax);
    EXPECT_EQ(vtc::encode_dump(d), bytes);
}

TEST(DumpIo, DeclaredShapeLargerThanPayloadIsTruncation) {
    std::mt19937_64 rng(3);
    auto d = vtc::oracle::random_dump(rng, 1, 1, {23, 24}, 2);
    auto bytes = vtc::encode_dump(d);
    bytes[16] = 24;  // H
    std::uint64_t offset = 0;
    EXPECT_EQ(decode_error(bytes, &offset), Kind::truncated_payload);
    EXPECT_EQ(offset, bytes.size());
}

TEST(DumpIo, CorruptionFixturesRaiseNamedErrors) {
    const auto good = smallest();
    std::uint64_t offset = 0;

    auto bad_magic = good;
    bad_magic[3] = 'X';
    EXPECT_EQ(decode_error(bad_magic, &offset), Kind::bad_magic);
    EXPECT_EQ(offset, 0u);

    auto version = good;
    version[4] = 2;
    EXPECT_EQ(decode_error(version, &offset), Kind::version_mismatch);
    EXPECT_EQ(offset, 4u);

    EXPECT_EQ(decode_error({good.begin(), good.begin() + 20}), Kind::truncated_payload);
    EXPECT_EQ(decode_error({good.begin(), good.begin() + 2}), Kind::truncated_payload);
    EXPECT_EQ(decode_error({good.begin(), good.end() - 1}), Kind::truncated_payload);

    auto zero_dim = good;
    zero_dim[24] = 0;  // D
    EXPECT_EQ(decode_error(zero_dim, &offset), Kind::shape_mismatch);
    EXPECT_EQ(offset, 24u);

    auto reserved = good;
    reserved[28] = 0x02;
    EXPECT_EQ(decode_error(reserved, &offset), Kind::reserved_bits);
    EXPECT_EQ(offset, 28u);

    auto padding = good;
    padding[30] = 1;
    EXPECT_EQ(decode_error(padding, &offset), Kind::reserved_bits);
    EXPECT_EQ(offset, 30u);

    auto trailing = good;
    trailing.push_back(0);
    EXPECT_EQ(decode_error(trailing, &offset), Kind::trailing_bytes);
    EXPECT_EQ(offset, good.size());

    auto nan_attention = header(1, 1, 2, 2, 1);
    append_floats(nan_attention, {0.1f, std::numeric_limits<float>::quiet_NaN(), 0.3f, 0.2f, 0, 0, 0, 0});
    EXPECT_EQ(decode_error(nan_attention, &offset), Kind::non_finite);
    EXPECT_EQ(offset, 36u);

    auto negative = header(1, 1, 2, 2, 1);
    append_floats(negative, {0.1f, 0.2f, -0.3f, 0.2f, 0, 0, 0, 0});
    EXPECT_EQ(decode_error(negative, &offset), Kind::negative_score);
    EXPECT_EQ(offset, 40u);

    auto inf_embedding = header(1, 1, 2, 2, 1);
    append_floats(inf_embedding, {0.1f, 0.2f, 0.3f, 0.2f, 0, 0, 0, std::numeric_limits<float>::infinity()});
    EXPECT_EQ(decode_error(inf_embedding, &offset), Kind::non_finite);
    EXPECT_EQ(offset, 60u);

    auto huge = header(0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu);
    EXPECT_EQ(decode_error(huge), Kind::truncated_payload);
}

TEST(DumpIo, EncodeRejectsInvalidDump) {
    auto d = vtc::decode_dump(smallest());
    d.attention.pop_back();
    EXPECT_THROW(vtc::encode_dump(d), vtc::FormatError);
}

TEST(DumpIo, GoldenSyntheticChecksum) {
    // Frozen from tests/oracle/vtdk_golden.py, an independent implementation of
    // the synthetic model and the byte layout.
    vtc::PipelineConfig c;
    c.frame_shape = {4, 4};
    c.segment_len = 2;
    c.grid = {1, 2};
    c.embed_dim = 3;
    const auto bytes = vtc::encode_dump(vtc::synthesize(c, {42, 2.0, 2.0}));
    EXPECT_EQ(bytes.size(), 1056u);
    EXPECT_EQ(vtc::oracle::fnv1a64(bytes), 0xE068FB1829C7F889ull);
}

TEST(DumpIo, RoundTripPropertyOverSeededDumps) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::uint32_t> small(1, 4), side(1, 9);
    for (int i = 0; i < 100; ++i) {
        const auto d = vtc::oracle::random_dump(rng, small(rng), small(rng), {side(rng), side(rng)}, small(rng), i % 3);
        std::stringstream stream;
        vtc::write_dump(d, stream);
        const auto bytes = stream.str();
        const auto loaded = vtc::load_dump(stream);
        ASSERT_EQ(loaded, d);
        const auto again = vtc::encode_dump(loaded);
        ASSERT_EQ(std::string(again.begin(), again.end()), bytes);
    }
}

TEST(DumpIo, EqualDumpsEncodeIdentically) {
    std::mt19937_64 a(9), b(9);
    EXPECT_EQ(vtc::encode_dump(vtc::oracle::random_dump(a, 2, 3, {4, 6}, 2)),
              vtc::encode_dump(vtc::oracle::random_dump(b, 2, 3, {4, 6}, 2)));
}

}  // namespace
