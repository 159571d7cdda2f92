#include "heatup/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "heatup/analysis.hpp"
#include "heatup/checkpoint.hpp"
#include "heatup/errors.hpp"
#include "heatup/svgplot.hpp"

namespace heatup {

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << text;
    if (!out) throw IoError("short write to " + path);
}

RunConfig config_for(const nlohmann::json& embedded, const std::string& override_path) {
    if (!override_path.empty()) {
        std::ifstream in(override_path);
        if (!in) throw IoError("cannot open config " + override_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ArgumentError("config " + override_path + ": " + e.what());
        }
        return RunConfig::from_json(j);
    }
    if (embedded.is_null())
        throw ArgumentError("checkpoint carries no config; pass --config");
    return RunConfig::from_json(embedded);
}

// Inference-mode embeddings of a batch, in chunks to bound memory.
EmbeddingSet extract_embeddings(const TrainerState& st, const SampleBatch& batch,
                                Tensor2D* raw_out = nullptr) {
    EmbeddingSet set;
    set.embeddings = Tensor2D(batch.size(), st.arch.embedding_dim);
    if (raw_out) *raw_out = Tensor2D(batch.size(), st.arch.embedding_dim);
    set.labels = batch.labels;
    const std::size_t chunk = 512;
    for (std::size_t start = 0; start < batch.size(); start += chunk) {
        std::size_t end = std::min(batch.size(), start + chunk);
        Tensor2D x(end - start, batch.dim());
        for (std::size_t i = start; i < end; ++i)
            for (std::size_t j = 0; j < batch.dim(); ++j) x(i - start, j) = batch.x(i, j);
        Tensor2D f;
        Tensor2D f_hat = st.net.forward_infer(x, &f);
        for (std::size_t i = start; i < end; ++i)
            for (std::size_t j = 0; j < f_hat.cols(); ++j) {
                set.embeddings(i, j) = f_hat(i - start, j);
                if (raw_out) (*raw_out)(i, j) = f(i - start, j);
            }
    }
    return set;
}

std::vector<double> default_alpha_grid() {
    std::vector<double> g;
    for (double a = 0.25; a <= 256.0; a *= 2.0) g.push_back(a);
    return g;
}

std::vector<double> default_scale_grid() { return {1, 2, 5, 10, 20, 50, 100}; }

}  // namespace

void cmd_train(const RunConfig& cfg, const std::string& resume_path) {
    cfg.validate();
    Dataset ds = make_dataset(cfg);
    ArchDescriptor arch = make_arch(cfg, ds);

    TrainerState st = resume_path.empty()
                          ? make_trainer(arch, cfg.schedule.alpha_at(0), cfg.seed)
                          : load_checkpoint(resume_path);
    if (!resume_path.empty()) {
        if (st.arch.input_dim != arch.input_dim || st.arch.hidden != arch.hidden ||
            st.arch.embedding_dim != arch.embedding_dim ||
            st.arch.num_classes != arch.num_classes)
            throw ArgumentError("resume: checkpoint architecture does not match the config");
    }

    TrainOptions opts;
    opts.batch_size = cfg.batch_size;
    opts.momentum = cfg.momentum;
    TrainingLog log = run_schedule(st, ds.train, cfg.schedule, opts);

    std::filesystem::create_directories(cfg.out_dir);
    write_text(cfg.out_dir + "/train_log.csv", log.to_csv());
    write_text(cfg.out_dir + "/config.json", cfg.to_json().dump(2) + "\n");
    save_checkpoint(st, cfg.out_dir + "/checkpoint.bin", cfg.to_json());

    if (!log.records.empty()) {
        const auto& last = log.records.back();
        std::printf("trained %zu epochs, final alpha %.4g lr %.4g loss %.6f acc %.4f\n",
                    log.records.size(), last.alpha, last.lr, last.mean_loss, last.train_acc);
    }
}

void cmd_eval(const EvalOptions& opts) {
    nlohmann::json embedded;
    TrainerState st = load_checkpoint(opts.checkpoint, &embedded);
    RunConfig cfg = config_for(embedded, opts.config_path);
    Dataset ds = make_dataset(cfg);

    EmbeddingSet set = extract_embeddings(st, ds.test);
    Rng rng(opts.seed);
    EvalReport report = evaluate_embeddings(set, opts.ks, rng);

    std::filesystem::create_directories(opts.out_dir);
    write_text(opts.out_dir + "/eval_report.json", report.to_json().dump(2) + "\n");
    export_embeddings_csv(set, opts.out_dir + "/embeddings.csv");

    std::printf("%-12s %.6f\n", "nmi", report.nmi);
    for (const auto& [k, v] : report.recall) std::printf("recall@%-5zu %.6f\n", k, v);
    std::printf("%-12s %.6f\n", "intra_cos", report.intra_cosine);
    std::printf("%-12s %.6f\n", "inter_cos", report.inter_cosine);
}

void cmd_analyze(const AnalyzeOptions& opts) {
    nlohmann::json embedded;
    TrainerState st = load_checkpoint(opts.checkpoint, &embedded);
    RunConfig cfg = config_for(embedded, opts.config_path);
    Dataset ds = make_dataset(cfg);

    Tensor2D raw;
    EmbeddingSet set = extract_embeddings(st, ds.train, &raw);
    double tau = opts.tau >= 0.0 ? opts.tau
                                 : default_tau(st.head, set.embeddings, set.labels);
    TypeCensus census = type_census(st.head, set.embeddings, set.labels, tau);

    std::filesystem::create_directories(opts.out_dir);
    nlohmann::json jc = {{"hard", census.hard},
                         {"boundary", census.boundary},
                         {"centroid", census.centroid},
                         {"tau", census.tau},
                         {"hard_fraction", census.hard_fraction()},
                         {"total", census.total()}};
    write_text(opts.out_dir + "/census.json", jc.dump(2) + "\n");

    // Representatives: first per_type samples of each type in scan order.
    std::vector<std::size_t> ids;
    std::size_t n_hard = 0, n_boundary = 0, n_centroid = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        auto cls = classify_sample(st.head, set.embeddings.row_span(i), set.labels[i], tau);
        std::size_t* counter = cls.type == SampleType::hard       ? &n_hard
                               : cls.type == SampleType::boundary ? &n_boundary
                                                                  : &n_centroid;
        if (*counter < opts.per_type) {
            ids.push_back(i);
            ++*counter;
        }
    }
    Tensor2D rows(ids.size(), set.dim());
    std::vector<int> labels(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j < set.dim(); ++j) rows(i, j) = set.embeddings(ids[i], j);
        labels[i] = set.labels[ids[i]];
    }
    std::vector<double> agrid = opts.alpha_grid.empty() ? default_alpha_grid() : opts.alpha_grid;
    std::vector<SweepCurve> curves = alpha_sweep(st.head, rows, labels, ids, agrid, tau);
    write_text(opts.out_dir + "/alpha_sweep.csv", sweep_csv(curves));

    bool is_off_the_shelf =
        st.arch.weight_norm == WeightNorm::off && st.arch.embed_norm == EmbedNorm::none;
    if (is_off_the_shelf) {
        std::vector<double> sgrid =
            opts.scale_grid.empty() ? default_scale_grid() : opts.scale_grid;
        std::vector<SweepCurve> ncurves;
        for (std::size_t i = 0; i < ids.size(); ++i)
            ncurves.push_back(
                norm_sweep(st.head, raw.row_span(ids[i]), labels[i], ids[i], sgrid, tau));
        write_text(opts.out_dir + "/norm_sweep.csv", sweep_csv(ncurves));
    } else {
        std::fprintf(stderr, "warning: norm sweep skipped (model uses normalization)\n");
    }

    std::printf("tau %.6g | hard %zu boundary %zu centroid %zu of %zu\n", tau, census.hard,
                census.boundary, census.centroid, census.total());
}

void cmd_plot(const PlotOptions& opts) {
    if (opts.out_svg.empty()) throw ArgumentError("plot: --out file required");
    if (!opts.embeddings_csv.empty()) {
        EmbeddingSet set = import_embeddings_csv(opts.embeddings_csv);
        if (set.size() > 0 && set.dim() != 2)
            throw ArgumentError("plot: scatter needs k = 2 embeddings (got k = " +
                                std::to_string(set.dim()) +
                                "); run eval for metrics instead");
        Tensor2D weights;
        const Tensor2D* wptr = nullptr;
        if (!opts.checkpoint.empty()) {
            TrainerState st = load_checkpoint(opts.checkpoint);
            if (st.arch.embedding_dim != 2)
                throw ArgumentError("plot: checkpoint embedding dim is not 2");
            weights = st.head.normalized_weight();
            wptr = &weights;
        }
        write_text(opts.out_svg, scatter_svg(set, wptr));
    } else if (!opts.sweep_csv_path.empty()) {
        std::ifstream in(opts.sweep_csv_path);
        if (!in) throw IoError("cannot open " + opts.sweep_csv_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::vector<SweepCurve> curves = parse_sweep_csv(text);
        write_text(opts.out_svg, sweep_svg(curves));
    } else {
        throw ArgumentError("plot: pass --embeddings or --sweep");
    }
}

}  // namespace heatup
