// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "vtc/config.hpp"

namespace {

using vtc::GridShape;
using vtc::PipelineConfig;
using vtc::SummaryPlacement;

PipelineConfig make(std::uint32_t f, GridShape grid, std::optional<GridShape> pool = std::nullopt) {
    PipelineConfig c;
    c.frame_shape = {24, 24};
    c.segment_len = f;
    c.grid = grid;
    c.pool = pool;
    c.summary_placement = pool ? SummaryPlacement::tail : SummaryPlacement::none;
    return c;
}

TEST(Accounting, DefaultWithSummaryTail) {
    const auto acc = vtc::derive_accounting(make(5, {2, 2}, GridShape{3, 4}));
    EXPECT_EQ(acc.compressed_count, 2880u);
    EXPECT_EQ(acc.summary_count, 240u);
    EXPECT_EQ(acc.total_frames, 20u);
    ASSERT_TRUE(acc.summary);
    EXPECT_EQ(acc.summary->receptive_field, (GridShape{6, 8}));
    EXPECT_EQ(acc.summary->frame_summary, (GridShape{4, 3}));
}

TEST(Accounting, PoolAbsent) {
    const auto acc = vtc::derive_accounting(make(5, {2, 2}));
    EXPECT_EQ(acc.compressed_count, 2880u);
    EXPECT_EQ(acc.summary_count, 0u);
    EXPECT_FALSE(acc.summary);
}

TEST(Accounting, IdentityGrid) {
    const auto acc = vtc::derive_accounting(make(5, {1, 1}));
    EXPECT_EQ(acc.compressed_count, 2880u);
    EXPECT_EQ(acc.total_frames, 5u);
}

TEST(Accounting, SegmentLengthAndGridSweeps) {
    EXPECT_EQ(vtc::derive_accounting(make(6, {2, 2})).compressed_count, 3456u);
    EXPECT_EQ(vtc::derive_accounting(make(5, {2, 4})).total_frames, 40u);
}

TEST(Accounting, PoolWithoutPlacementEmitsNoSummary) {
    auto c = make(5, {2, 2}, GridShape{3, 4});
    c.summary_placement = SummaryPlacement::none;
    const auto acc = vtc::derive_accounting(c);
    EXPECT_EQ(acc.summary_count, 0u);
    ASSERT_TRUE(acc.summary);
    EXPECT_EQ(acc.summary->frame_summary, (GridShape{4, 3}));
}

TEST(Accounting, CompressedCountIndependentOfGridAndReceptiveFieldTilesFrame) {
    const GridShape grids[] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {2, 3}, {3, 2}, {2, 4}, {3, 3}, {4, 4}, {6, 6}};
    for (std::uint32_t f = 1; f <= 8; ++f) {
        for (auto g : grids) {
            const auto base = make(f, g);
            EXPECT_EQ(vtc::derive_accounting(base).compressed_count, std::size_t{f} * 576);
            const auto hg = base.compressed_frame();
            for (std::uint32_t sh = 1; sh <= hg.height; ++sh) {
                for (std::uint32_t sw = 1; sw <= hg.width; ++sw) {
                    if (hg.height % sh || hg.width % sw) continue;
                    const auto acc = vtc::derive_accounting(make(f, g, GridShape{sh, sw}));
                    EXPECT_EQ(acc.summary->receptive_field.area() * acc.summary->frame_summary.area(), 576u);
                    EXPECT_EQ(acc.summary_count, std::size_t{acc.total_frames} * acc.summary->frame_summary.area());
                    EXPECT_EQ(acc, vtc::derive_accounting(make(f, g, GridShape{sh, sw})));
                }
            }
        }
    }
}

TEST(Config, DivisibilityErrorsNameDimension) {
    auto expect_dim = [](const PipelineConfig& c, const std::string& dim) {
        try {
            c.validate();
            FAIL() << "expected ConfigError for " << dim;
        } catch (const vtc::ConfigError& e) {
            EXPECT_EQ(e.dimension(), dim);
        }
    };
    expect_dim(make(5, {5, 5}), "grid.height");
    expect_dim(make(5, {2, 5}), "grid.width");
    expect_dim(make(5, {2, 2}, GridShape{5, 3}), "pool.height");
    expect_dim(make(5, {2, 2}, GridShape{3, 5}), "pool.width");
    auto head_without_pool = make(5, {2, 2});
    head_without_pool.summary_placement = SummaryPlacement::head;
    expect_dim(head_without_pool, "summary_placement");
    expect_dim(make(0, {2, 2}), "segment_len");
}

TEST(Config, ParseGridShape) {
    EXPECT_EQ(vtc::parse_grid_shape("3x4"), (GridShape{3, 4}));
    EXPECT_EQ(vtc::parse_grid_shape("24X24"), (GridShape{24, 24}));
    for (const char* bad : {"3", "x4", "3x", "0x2", "3x4x5", "-1x2", "ax2", ""}) {
        EXPECT_THROW(vtc::parse_grid_shape(bad), vtc::ConfigError) << bad;
    }
}

TEST(TokenIndex, FlatIsFrameMajorRaster) {
    const GridShape shape{24, 24};
    EXPECT_EQ((vtc::TokenIndex{0, 0, 0}.flat(shape)), 0u);
    EXPECT_EQ((vtc::TokenIndex{0, 1, 0}.flat(shape)), 24u);
    EXPECT_EQ((vtc::TokenIndex{2, 3, 5}.flat(shape)), 2u * 576 + 3 * 24 + 5);
}

}  // namespace
