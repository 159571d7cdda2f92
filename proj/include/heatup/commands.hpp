#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heatup/config.hpp"

namespace heatup {

// Command implementations behind the CLI. Each throws on failure; the
// front end maps exception types to exit codes.

struct EvalOptions {
    std::string checkpoint;
    std::string config_path;  // optional dataset/config override
    std::vector<std::size_t> ks = {1, 2, 4, 8};
    std::uint64_t seed = 1;
    std::string out_dir = "out";
};

struct AnalyzeOptions {
    std::string checkpoint;
    std::string config_path;
    double tau = -1.0;  // < 0 selects the median-positive-margin default
    std::vector<double> alpha_grid;
    std::vector<double> scale_grid;
    std::size_t per_type = 3;
    std::string out_dir = "out";
};

struct PlotOptions {
    std::string embeddings_csv;
    std::string sweep_csv_path;
    std::string checkpoint;  // optional, draws weight diamonds on scatters
    std::string out_svg;
};

// Trains per config (optionally resuming), then writes checkpoint.bin,
// train_log.csv and config.json into the output directory.
void cmd_train(const RunConfig& cfg, const std::string& resume_path = "");

// Extracts test embeddings in inference mode, runs the clustering /
// retrieval / compactness protocol, writes eval_report.json and
// embeddings.csv, prints a small table.
void cmd_eval(const EvalOptions& opts);

// Type census plus gradient-magnitude sweeps on representative samples;
// writes census.json, alpha_sweep.csv and (for unnormalized models)
// norm_sweep.csv.
void cmd_analyze(const AnalyzeOptions& opts);

// Renders an embedding scatter or sweep curves to a self-contained SVG.
void cmd_plot(const PlotOptions& opts);

}  // namespace heatup
