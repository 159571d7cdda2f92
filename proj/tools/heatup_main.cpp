#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heatup/commands.hpp"
#include "heatup/errors.hpp"

namespace {

heatup::RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw heatup::IoError("cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw heatup::ArgumentError("config " + path + ": " + e.what());
    }
    return heatup::RunConfig::from_json(j);
}

std::vector<std::size_t> parse_ks(const std::string& csv) {
    std::vector<std::size_t> ks;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        ks.push_back(std::stoull(csv.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (ks.empty()) throw heatup::ArgumentError("--ks: empty list");
    return ks;
}

std::vector<std::size_t> parse_widths(const std::string& csv) {
    std::vector<std::size_t> ws;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        ws.push_back(std::stoull(csv.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return ws;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heatup: temperature-scaled softmax embedding trainer"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "train an embedding per config/preset");
    std::string t_config, t_preset, t_out, t_data, t_mnist_dir, t_hidden, t_resume;
    std::uint64_t t_seed = 0;
    bool t_seed_set = false, t_out_set = false, t_data_set = false;
    double t_lr = 0.0;
    std::size_t t_epochs = 0, t_epochs_fine = 0, t_batch = 0, t_k = 0, t_mnist_limit = 0;
    train->add_option("--config", t_config, "JSON config file");
    train->add_option("--preset", t_preset, "sm | ln | bn | hln | hbn");
    train->add_option("--seed", t_seed, "training seed")->each([&](const std::string&) { t_seed_set = true; });
    train->add_option("--out", t_out, "output directory")->each([&](const std::string&) { t_out_set = true; });
    train->add_option("--data", t_data, "blobs | mnist")->each([&](const std::string&) { t_data_set = true; });
    train->add_option("--mnist-dir", t_mnist_dir, "directory with the IDX files");
    train->add_option("--mnist-limit", t_mnist_limit, "cap on training samples");
    train->add_option("--lr", t_lr, "base learning rate");
    train->add_option("--epochs", t_epochs, "epochs for the main phase");
    train->add_option("--epochs-fine", t_epochs_fine, "epochs for the fine-tune phase");
    train->add_option("--batch", t_batch, "batch size");
    train->add_option("--k", t_k, "embedding dimension");
    train->add_option("--hidden", t_hidden, "hidden widths, e.g. 64,32");
    train->add_option("--resume", t_resume, "checkpoint to continue from");

    // eval
    auto* eval = app.add_subcommand("eval", "cluster/retrieval metrics for a checkpoint");
    heatup::EvalOptions eopts;
    std::string e_ks;
    eval->add_option("--checkpoint", eopts.checkpoint, "checkpoint file")->required();
    eval->add_option("--config", eopts.config_path, "dataset/config override");
    eval->add_option("--ks", e_ks, "comma-separated recall cutoffs (default 1,2,4,8)");
    eval->add_option("--seed", eopts.seed, "k-means seed");
    eval->add_option("--out", eopts.out_dir, "output directory");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "sample census and gradient sweeps");
    heatup::AnalyzeOptions aopts;
    analyze->add_option("--checkpoint", aopts.checkpoint, "checkpoint file")->required();
    analyze->add_option("--config", aopts.config_path, "dataset/config override");
    analyze->add_option("--tau", aopts.tau, "boundary/centroid margin threshold");
    analyze->add_option("--alpha-grid", aopts.alpha_grid, "alpha sweep grid");
    analyze->add_option("--scale-grid", aopts.scale_grid, "norm sweep grid");
    analyze->add_option("--per-type", aopts.per_type, "representatives per sample type");
    analyze->add_option("--out", aopts.out_dir, "output directory");

    // plot
    auto* plot = app.add_subcommand("plot", "render embeddings or sweeps to SVG");
    heatup::PlotOptions popts;
    plot->add_option("--embeddings", popts.embeddings_csv, "embeddings CSV (k = 2)");
    plot->add_option("--sweep", popts.sweep_csv_path, "sweep CSV");
    plot->add_option("--checkpoint", popts.checkpoint, "draw weight diamonds from this checkpoint");
    plot->add_option("--out", popts.out_svg, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }

    try {
        if (*train) {
            heatup::RunConfig cfg;
            if (!t_config.empty()) cfg = load_config_file(t_config);
            if (!t_preset.empty())
                cfg.apply_preset(t_preset, t_lr > 0.0 ? t_lr : 0.05,
                                 t_epochs > 0 ? t_epochs : 30,
                                 t_epochs_fine > 0 ? t_epochs_fine : 20);
            else if (t_lr > 0.0 || t_epochs > 0)
                throw heatup::ArgumentError(
                    "--lr/--epochs need --preset (or put the schedule in the config file)");
            if (t_seed_set) cfg.seed = t_seed;
            if (t_out_set) cfg.out_dir = t_out;
            if (t_data_set) cfg.dataset_kind = t_data;
            if (!t_mnist_dir.empty()) cfg.mnist_dir = t_mnist_dir;
            if (t_mnist_limit > 0) cfg.mnist_train_limit = t_mnist_limit;
            if (t_batch > 0) cfg.batch_size = t_batch;
            if (t_k > 0) cfg.embedding_dim = t_k;
            if (!t_hidden.empty()) cfg.hidden = parse_widths(t_hidden);
            heatup::cmd_train(cfg, t_resume);
        } else if (*eval) {
            if (!e_ks.empty()) eopts.ks = parse_ks(e_ks);
            heatup::cmd_eval(eopts);
        } else if (*analyze) {
            heatup::cmd_analyze(aopts);
        } else if (*plot) {
            heatup::cmd_plot(popts);
        }
    } catch (const heatup::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const heatup::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const heatup::ArgumentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
