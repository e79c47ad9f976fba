// SPDX-License-Identifier: Apache-2.0
//
// vtc: command-line front end for the video token compression engine.
//
//   vtc simulate      write a synthetic VTDK1 dump
//   vtc compress      run the two-stage pipeline, write VTSQ1 + stats JSON
//   vtc analyze-bias  per-frame top-k concentration and mean attention heatmaps
//   vtc report        token accounting table over a sweep of configurations
//
// Exit codes: 0 success, 1 I/O or data errors, 2 usage / configuration errors.
// Every error is printed as a single line starting with "vtc: error: <kind>: ".

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vtc/report.hpp"
#include "vtc/vtc.hpp"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

/// Exception carrying an exit code and error kind for main() to report.
struct CliError {
    int code;
    std::string kind;
    std::string message;
};

[[noreturn]] void fail(int code, std::string kind, std::string message) {
    throw CliError{code, std::move(kind), std::move(message)};
}

vtc::GridShape shape_flag(const std::string& text, const std::string& flag) {
    try {
        return vtc::parse_grid_shape(text, flag);
    } catch (const vtc::ConfigError& e) {
        fail(kExitUsage, "config", e.what());
    }
}

std::optional<vtc::GridShape> pool_flag(const std::string& text) {
    if (text == "none") return std::nullopt;
    return shape_flag(text, "--pool");
}

void validate_or_usage(const vtc::PipelineConfig& config) {
    try {
        config.validate();
    } catch (const vtc::ConfigError& e) {
        fail(kExitUsage, "config", e.what());
    }
}

vtc::TokenDump read_dump_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kExitData, "io", path + ": cannot open for reading");
    try {
        return vtc::load_dump(in);
    } catch (const vtc::FormatError& e) {
        fail(kExitData, "format", path + ": " + vtc::to_string(e.kind()) + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& contents, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) fail(kExitData, "io", path + ": cannot open for writing");
    out << contents;
    if (!out) fail(kExitData, "io", path + ": write failed");
}

std::string bytes_to_string(const std::vector<std::uint8_t>& bytes) { return {bytes.begin(), bytes.end()}; }

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string frames_shape = "24x24";
    std::uint32_t segment_len = 5;
    std::string grid = "2x2";
    std::uint32_t embed_dim = 8;
    std::uint64_t seed = 0;
    double beta = 0.0;
    double gamma = 1.0;
    std::string output;
};

int cmd_simulate(const SimulateArgs& args) {
    vtc::PipelineConfig config;
    config.frame_shape = shape_flag(args.frames_shape, "--frames-shape");
    config.segment_len = args.segment_len;
    config.grid = shape_flag(args.grid, "--grid");
    config.embed_dim = args.embed_dim;
    validate_or_usage(config);

    const vtc::SyntheticBiasParams params{args.seed, args.beta, args.gamma};
    try {
        params.validate();
    } catch (const vtc::ConfigError& e) {
        fail(kExitUsage, "config", e.what());
    }
    const auto dump = vtc::synthesize(config, params);
    const auto bytes = vtc::encode_dump(dump);
    write_file(args.output, bytes_to_string(bytes), true);
    std::cout << "wrote " << args.output << ": g=" << dump.segments << " F=" << dump.frames
              << " H=" << dump.frame_shape.height << " W=" << dump.frame_shape.width << " D=" << dump.dim << " ("
              << dump.token_count() << " tokens, " << bytes.size() << " bytes)\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct CompressArgs {
    std::string input;
    std::string grid = "2x2";
    std::string pool = "3x4";
    std::string placement;  // empty: tail when pooling, none otherwise
    unsigned workers = 1;
    std::uint32_t attn_layer = 3;
    std::string output;
    std::string stats;
};

int cmd_compress(const CompressArgs& args) {
    vtc::PipelineConfig config;
    config.grid = shape_flag(args.grid, "--grid");
    config.pool = pool_flag(args.pool);
    try {
        config.summary_placement = args.placement.empty()
                                       ? (config.pool ? vtc::SummaryPlacement::tail : vtc::SummaryPlacement::none)
                                       : vtc::parse_placement(args.placement);
    } catch (const vtc::ConfigError& e) {
        fail(kExitUsage, "config", e.what());
    }
    config.attn_layer = args.attn_layer;
    if (args.workers == 0) fail(kExitUsage, "usage", "--workers must be positive");

    const auto dump = read_dump_file(args.input);
    config.frame_shape = dump.frame_shape;
    config.segment_len = dump.frames;
    config.embed_dim = dump.dim;
    validate_or_usage(config);
    try {
        dump.check_matches(config);
    } catch (const vtc::ConfigError& e) {
        fail(kExitData, "format", args.input + ": " + e.what());
    }

    const auto seq = vtc::run_pipeline_parallel(dump, config, args.workers);
    write_file(args.output, bytes_to_string(vtc::encode_sequence(seq)), true);

    auto stats = vtc::to_json(vtc::derive_accounting(config));
    stats["attn_layer"] = config.attn_layer;
    const auto text = stats.dump(2) + "\n";
    if (!args.stats.empty()) write_file(args.stats, text);
    std::cout << text;
    return 0;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::vector<std::string> inputs;
    std::optional<std::size_t> k;
    std::optional<double> top_fraction;
    std::string selector = "topk";
    std::string grid = "2x2";
    std::string segment = "all";
    std::string json;
    std::string csv;
};

int cmd_analyze_bias(const AnalyzeArgs& args) {
    if (args.selector != "topk" && args.selector != "gapool") {
        fail(kExitUsage, "usage", "--selector must be topk or gapool, got '" + args.selector + "'");
    }
    const auto grid = shape_flag(args.grid, "--grid");
    vtc::SegmentSelector selector;
    if (args.segment != "all") {
        try {
            selector = static_cast<std::uint32_t>(std::stoul(args.segment));
        } catch (const std::exception&) {
            fail(kExitUsage, "usage", "--segment must be 'all' or a segment index, got '" + args.segment + "'");
        }
    }

    std::vector<vtc::TokenDump> dumps;
    dumps.reserve(args.inputs.size());
    for (const auto& path : args.inputs) {
        dumps.push_back(read_dump_file(path));
        const auto& d = dumps.back();
        const auto& first = dumps.front();
        if (d.frames != first.frames || d.frame_shape != first.frame_shape) {
            fail(kExitData, "format", path + ": shape (F=" + std::to_string(d.frames) + ", " +
                                          vtc::to_string(d.frame_shape) + ") differs from " + args.inputs.front());
        }
        if (selector && *selector >= d.segments) {
            fail(kExitData, "format", path + ": has " + std::to_string(d.segments) + " segments, --segment " +
                                          args.segment + " is out of range");
        }
    }

    const auto& first = dumps.front();
    const std::size_t tokens = first.tokens_per_segment();
    std::size_t k = 0;
    if (args.selector == "topk") {
        if (args.k) {
            k = *args.k;
        } else {
            const double fraction = args.top_fraction.value_or(0.25);
            if (!(fraction > 0.0 && fraction <= 1.0)) fail(kExitUsage, "usage", "--top-fraction must be in (0, 1]");
            k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(tokens)));
        }
        if (k == 0 || k > tokens) {
            fail(kExitUsage, "usage", "k=" + std::to_string(k) + " outside [1, " + std::to_string(tokens) +
                                          "] tokens per segment");
        }
    } else {
        vtc::PipelineConfig check;
        check.frame_shape = first.frame_shape;
        check.segment_len = first.frames;
        check.grid = grid;
        validate_or_usage(check);
    }

    vtc::BiasReport report;
    for (std::size_t i = 0; i < dumps.size(); ++i) {
        const auto& d = dumps[i];
        const std::uint32_t lo = selector ? *selector : 0;
        const std::uint32_t hi = selector ? *selector + 1 : d.segments;
        for (std::uint32_t s = lo; s < hi; ++s) {
            const auto view = d.segment(s);
            vtc::merge_reports(report, args.selector == "topk" ? vtc::tail_concentration(view, k)
                                                               : vtc::gapool_concentration(view, grid));
        }
    }
    const auto heatmap = vtc::aggregate_heatmap(dumps, selector);

    auto doc = vtc::to_json(report);
    doc["selector"] = args.selector;
    if (args.selector == "gapool") doc["grid"] = vtc::to_string(grid);
    doc["heatmap"] = vtc::to_json(heatmap);
    const auto text = doc.dump(2) + "\n";
    if (args.json.empty()) {
        std::cout << text;
    } else {
        write_file(args.json, text);
    }
    if (!args.csv.empty()) {
        std::ostringstream csv;
        vtc::write_heatmap_csv(heatmap, csv);
        write_file(args.csv, csv.str());
    }
    if (!args.json.empty()) {
        std::cout << "selector=" << args.selector << " k=" << report.k << " samples=" << report.samples
                  << " last_frame_share=" << vtc::format_double(report.last_frame_share()) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
    std::string frames_shape = "24x24";
    std::vector<std::uint32_t> segment_lens{5};
    std::vector<std::string> grids{"2x2"};
    std::vector<std::string> pools{"none"};
    bool keep_invalid = false;
    std::string output;
};

int cmd_report(const ReportArgs& args) {
    const auto frame_shape = shape_flag(args.frames_shape, "--frames-shape");
    std::ostringstream csv;
    csv << "frame_shape,segment_len,grid,pool,status,compressed,summary,total,frames,receptive_field,frame_summary,"
           "error\n";
    for (auto f : args.segment_lens) {
        for (const auto& grid_text : args.grids) {
            for (const auto& pool_text : args.pools) {
                vtc::PipelineConfig config;
                config.frame_shape = frame_shape;
                config.segment_len = f;
                config.grid = shape_flag(grid_text, "--grid");
                config.pool = pool_flag(pool_text);
                config.summary_placement = config.pool ? vtc::SummaryPlacement::tail : vtc::SummaryPlacement::none;
                csv << vtc::to_string(frame_shape) << ',' << f << ',' << grid_text << ',' << pool_text << ',';
                try {
                    const auto acc = vtc::derive_accounting(config);
                    csv << "ok," << acc.compressed_count << ',' << acc.summary_count << ',' << acc.total() << ','
                        << acc.total_frames << ',' << (acc.summary ? vtc::to_string(acc.summary->receptive_field) : "")
                        << ',' << (acc.summary ? vtc::to_string(acc.summary->frame_summary) : "") << ",\n";
                } catch (const vtc::ConfigError& e) {
                    if (!args.keep_invalid) fail(kExitUsage, "config", e.what());
                    csv << "invalid,,,,,,," << e.dimension() << "\n";
                }
            }
        }
    }
    if (args.output.empty()) {
        std::cout << csv.str();
    } else {
        write_file(args.output, csv.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attention-guided visual token compression for video LLM pipelines", "vtc"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Write a deterministic synthetic VTDK1 dump");
    simulate->add_option("--frames-shape", sim.frames_shape, "Tokens per frame, HxW")->capture_default_str();
    simulate->add_option("--segment-len", sim.segment_len, "Frames per segment (F)")->capture_default_str();
    simulate->add_option("--grid", sim.grid, "GAPool grid cell; its area sets the segment count")->capture_default_str();
    simulate->add_option("--embed-dim", sim.embed_dim, "Embedding width (D)")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "SplitMix64 seed")->capture_default_str();
    simulate->add_option("--beta", sim.beta, "Positional tail-bias strength (>= 0)")->capture_default_str();
    simulate->add_option("--gamma", sim.gamma, "Positional tail-bias sharpness (>= 1)")->capture_default_str();
    simulate->add_option("-o,--output", sim.output, "Output dump path")->required();

    CompressArgs comp;
    auto* compress = app.add_subcommand("compress", "Run GAPool + VSTail and write a VTSQ1 sequence");
    compress->add_option("-i,--input", comp.input, "Input VTDK1 dump")->required();
    compress->add_option("--grid", comp.grid, "GAPool grid cell, HxW")->capture_default_str();
    compress->add_option("--pool", comp.pool, "Summary pooling window, HxW or 'none'")->capture_default_str();
    compress->add_option("--placement", comp.placement, "Summary placement: none|head|tail (default tail with a pool)");
    compress->add_option("--workers", comp.workers, "Stage-one worker threads")->capture_default_str();
    compress->add_option("--attn-layer", comp.attn_layer, "Layer the attention was taken from (metadata)")
        ->capture_default_str();
    compress->add_option("-o,--output", comp.output, "Output VTSQ1 path")->required();
    compress->add_option("--stats", comp.stats, "Also write the stats JSON here");

    AnalyzeArgs ana;
    auto* analyze = app.add_subcommand("analyze-bias", "Per-frame selection concentration and mean attention heatmap");
    analyze->add_option("-i,--input", ana.inputs, "Input VTDK1 dumps")->required();
    auto* k_opt = analyze->add_option("--k", ana.k, "Number of top tokens per segment");
    auto* frac_opt = analyze->add_option("--top-fraction", ana.top_fraction, "Top fraction of tokens (default 0.25)");
    k_opt->excludes(frac_opt);
    analyze->add_option("--selector", ana.selector, "topk or gapool")->capture_default_str();
    analyze->add_option("--grid", ana.grid, "GAPool grid cell for --selector gapool")->capture_default_str();
    analyze->add_option("--segment", ana.segment, "'all' or a segment index")->capture_default_str();
    analyze->add_option("--json", ana.json, "Write the JSON report here instead of stdout");
    analyze->add_option("--csv", ana.csv, "Write the heatmap CSV here");

    ReportArgs rep;
    auto* report = app.add_subcommand("report", "Token accounting table (CSV) over a configuration sweep");
    report->add_option("--frames-shape", rep.frames_shape, "Tokens per frame, HxW")->capture_default_str();
    report->add_option("--segment-len", rep.segment_lens, "Frames per segment, comma separated")->delimiter(',');
    report->add_option("--grid", rep.grids, "Grid cells, comma separated")->delimiter(',');
    report->add_option("--pool", rep.pools, "Pooling windows or 'none', comma separated")->delimiter(',');
    report->add_flag("--keep-invalid", rep.keep_invalid, "Emit invalid configurations as rows instead of failing");
    report->add_option("-o,--output", rep.output, "Write the CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "vtc: error: usage: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (compress->parsed()) return cmd_compress(comp);
        if (analyze->parsed()) return cmd_analyze_bias(ana);
        if (report->parsed()) return cmd_report(rep);
    } catch (const CliError& e) {
        std::cerr << "vtc: error: " << e.kind << ": " << e.message << "\n";
        return e.code;
    } catch (const vtc::ConfigError& e) {
        std::cerr << "vtc: error: config: " << e.what() << "\n";
        return kExitUsage;
    } catch (const vtc::FormatError& e) {
        std::cerr << "vtc: error: format: " << vtc::to_string(e.kind()) << ": " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "vtc: error: internal: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
