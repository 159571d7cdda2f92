#include "heatup/config.hpp"

#include <algorithm>

#include "heatup/errors.hpp"

namespace heatup {

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["dataset"] = {{"kind", dataset_kind},
                    {"mnist_dir", mnist_dir},
                    {"mnist_train_limit", mnist_train_limit},
                    {"blobs",
                     {{"classes", blobs.classes},
                      {"dim", blobs.dim},
                      {"per_class", blobs.per_class},
                      {"min_angle_deg", blobs.min_angle_deg},
                      {"sigma", blobs.sigma},
                      {"seed", blobs.seed},
                      {"split", to_string(blobs.split)},
                      {"train_fraction", blobs.train_fraction}}}};
    j["model"] = {{"hidden", hidden},
                  {"embedding_dim", embedding_dim},
                  {"embed_norm", to_string(embed_norm)},
                  {"weight_norm", to_string(weight_norm)}};
    if (schedule.mode == ScheduleMode::step) {
        nlohmann::json phases = nlohmann::json::array();
        for (const auto& p : schedule.phases)
            phases.push_back({{"alpha", p.alpha}, {"lr", p.lr}, {"epochs", p.epochs}});
        j["schedule"] = {{"mode", "step"}, {"phases", phases}};
    } else {
        j["schedule"] = {{"mode", "ramp"},
                         {"alpha_start", schedule.ramp_alpha_start},
                         {"alpha_end", schedule.ramp_alpha_end},
                         {"epochs", schedule.ramp_epochs},
                         {"lr", schedule.ramp_lr}};
    }
    j["optimizer"] = {{"momentum", momentum}};
    j["batch_size"] = batch_size;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    if (!preset.empty()) j["preset"] = preset;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig cfg;
    if (j.contains("dataset")) {
        const auto& d = j["dataset"];
        if (d.contains("kind")) cfg.dataset_kind = d["kind"].get<std::string>();
        if (d.contains("mnist_dir")) cfg.mnist_dir = d["mnist_dir"].get<std::string>();
        if (d.contains("mnist_train_limit"))
            cfg.mnist_train_limit = d["mnist_train_limit"].get<std::size_t>();
        if (d.contains("blobs")) {
            const auto& b = d["blobs"];
            if (b.contains("classes")) cfg.blobs.classes = b["classes"].get<std::size_t>();
            if (b.contains("dim")) cfg.blobs.dim = b["dim"].get<std::size_t>();
            if (b.contains("per_class")) cfg.blobs.per_class = b["per_class"].get<std::size_t>();
            if (b.contains("min_angle_deg"))
                cfg.blobs.min_angle_deg = b["min_angle_deg"].get<double>();
            if (b.contains("sigma")) cfg.blobs.sigma = b["sigma"].get<double>();
            if (b.contains("seed")) cfg.blobs.seed = b["seed"].get<std::uint64_t>();
            if (b.contains("split"))
                cfg.blobs.split = split_mode_from_string(b["split"].get<std::string>());
            if (b.contains("train_fraction"))
                cfg.blobs.train_fraction = b["train_fraction"].get<double>();
        }
    }
    if (j.contains("model")) {
        const auto& m = j["model"];
        if (m.contains("hidden")) cfg.hidden = m["hidden"].get<std::vector<std::size_t>>();
        if (m.contains("embedding_dim")) cfg.embedding_dim = m["embedding_dim"].get<std::size_t>();
        if (m.contains("embed_norm"))
            cfg.embed_norm = embed_norm_from_string(m["embed_norm"].get<std::string>());
        if (m.contains("weight_norm"))
            cfg.weight_norm = weight_norm_from_string(m["weight_norm"].get<std::string>());
    }
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        std::string mode = s.value("mode", "step");
        if (mode == "step") {
            cfg.schedule.mode = ScheduleMode::step;
            cfg.schedule.phases.clear();
            for (const auto& p : s.at("phases"))
                cfg.schedule.phases.push_back({p.at("alpha").get<double>(),
                                               p.at("lr").get<double>(),
                                               p.at("epochs").get<std::size_t>()});
        } else if (mode == "ramp") {
            cfg.schedule.mode = ScheduleMode::ramp;
            cfg.schedule.ramp_alpha_start = s.at("alpha_start").get<double>();
            cfg.schedule.ramp_alpha_end = s.at("alpha_end").get<double>();
            cfg.schedule.ramp_epochs = s.at("epochs").get<std::size_t>();
            cfg.schedule.ramp_lr = s.at("lr").get<double>();
        } else {
            throw ArgumentError("unknown schedule mode '" + mode + "' (step, ramp)");
        }
    }
    if (j.contains("optimizer") && j["optimizer"].contains("momentum"))
        cfg.momentum = j["optimizer"]["momentum"].get<double>();
    if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("preset")) cfg.preset = j["preset"].get<std::string>();
    return cfg;
}

void RunConfig::apply_preset(const std::string& name, double base_lr, std::size_t epochs_main,
                             std::size_t epochs_fine) {
    if (name == "sm") {
        embed_norm = EmbedNorm::none;
        weight_norm = WeightNorm::off;
        schedule = TemperatureSchedule::single_phase(1.0, base_lr, epochs_main);
    } else if (name == "ln") {
        embed_norm = EmbedNorm::l2;
        weight_norm = WeightNorm::l2;
        schedule = TemperatureSchedule::single_phase(16.0, base_lr, epochs_main);
    } else if (name == "bn") {
        embed_norm = EmbedNorm::batchnorm;
        weight_norm = WeightNorm::l2;
        schedule = TemperatureSchedule::single_phase(16.0, base_lr, epochs_main);
    } else if (name == "hln") {
        embed_norm = EmbedNorm::l2;
        weight_norm = WeightNorm::l2;
        schedule = TemperatureSchedule::heat_up(16.0, 4.0, base_lr, epochs_main, epochs_fine);
    } else if (name == "hbn") {
        embed_norm = EmbedNorm::batchnorm;
        weight_norm = WeightNorm::l2;
        schedule = TemperatureSchedule::heat_up(16.0, 4.0, base_lr, epochs_main, epochs_fine);
    } else {
        throw ArgumentError("unknown preset '" + name + "' (valid: sm, ln, bn, hln, hbn)");
    }
    preset = name;
}

void RunConfig::validate() const {
    if (dataset_kind != "blobs" && dataset_kind != "mnist")
        throw ArgumentError("dataset kind '" + dataset_kind + "' (valid: blobs, mnist)");
    if (embedding_dim == 0) throw ArgumentError("embedding_dim must be > 0");
    if (batch_size == 0) throw ArgumentError("batch_size must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ArgumentError("momentum must be in [0, 1)");
    schedule.validate();
}

Dataset make_dataset(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.dataset_kind == "blobs") return gen_blobs(cfg.blobs);

    Dataset ds;
    ds.split_mode = SplitMode::shared_classes;
    SampleBatch train = load_idx(cfg.mnist_dir + "/train-images-idx3-ubyte",
                                 cfg.mnist_dir + "/train-labels-idx1-ubyte");
    ds.test = load_idx(cfg.mnist_dir + "/t10k-images-idx3-ubyte",
                       cfg.mnist_dir + "/t10k-labels-idx1-ubyte");
    std::size_t limit = cfg.mnist_train_limit == 0
                            ? train.size()
                            : std::min(cfg.mnist_train_limit, train.size());
    if (limit < train.size()) {
        SampleBatch cut;
        cut.x = Tensor2D(limit, train.dim());
        cut.labels.assign(train.labels.begin(), train.labels.begin() + limit);
        for (std::size_t i = 0; i < limit; ++i)
            for (std::size_t j = 0; j < train.dim(); ++j) cut.x(i, j) = train.x(i, j);
        cut.num_classes = train.num_classes;
        ds.train = std::move(cut);
    } else {
        ds.train = std::move(train);
    }
    ds.class_count = std::max(ds.train.num_classes, ds.test.num_classes);
    ds.train.num_classes = ds.class_count;
    ds.test.num_classes = ds.class_count;
    return ds;
}

ArchDescriptor make_arch(const RunConfig& cfg, const Dataset& ds) {
    ArchDescriptor arch;
    arch.input_dim = ds.train.dim();
    arch.hidden = cfg.hidden;
    arch.embedding_dim = cfg.embedding_dim;
    arch.num_classes = ds.train.num_classes;
    arch.embed_norm = cfg.embed_norm;
    arch.weight_norm = cfg.weight_norm;
    return arch;
}

}  // namespace heatup
