// SPDX-License-Identifier: Apache-2.0
#pragma once

// Plot-ready JSON / CSV emitters for bias and accounting reports.

#include <cstdio>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "vtc/bias.hpp"
#include "vtc/config.hpp"

namespace vtc {

inline nlohmann::json to_json(const BiasReport& report) {
    return nlohmann::json{
        {"k", report.k},
        {"frames", report.frames},
        {"samples", report.samples},
        {"counts", report.per_frame_counts},
        {"shares", report.per_frame_shares},
    };
}

inline nlohmann::json to_json(const HeatmapAggregate& heatmap) {
    return nlohmann::json{
        {"frames", heatmap.frames},
        {"height", heatmap.frame_shape.height},
        {"width", heatmap.frame_shape.width},
        {"sample_count", heatmap.sample_count},
        {"segment_count", heatmap.segment_count},
        {"mean_scores", heatmap.mean_scores},
    };
}

inline nlohmann::json to_json(const Accounting& acc) {
    return nlohmann::json{
        {"compressed", acc.compressed_count},
        {"summary", acc.summary_count},
        {"total", acc.total()},
    };
}

/// %.17g keeps doubles round-trippable.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_heatmap_csv(const HeatmapAggregate& heatmap, std::ostream& out) {
    out << "frame,row,col,mean_score\n";
    for (std::uint32_t f = 0; f < heatmap.frames; ++f) {
        for (std::uint32_t r = 0; r < heatmap.frame_shape.height; ++r) {
            for (std::uint32_t c = 0; c < heatmap.frame_shape.width; ++c) {
                out << f << ',' << r << ',' << c << ',' << format_double(heatmap.at(f, r, c)) << '\n';
            }
        }
    }
}

}  // namespace vtc
