#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatup/dataio.hpp"
#include "heatup/model.hpp"
#include "heatup/schedule.hpp"

namespace heatup {

// A fully resolved training run. Serializes to JSON; flags override file
// values; presets expand to the five reference configurations:
//   sm   no normalization, learned bias, alpha = 1
//   ln   l2-normalized embedding and weights, alpha = 16
//   bn   batch-normalized embedding, l2 weights, alpha = 16
//   hln  ln fine-tuned at alpha = 4 with lr/10
//   hbn  bn fine-tuned at alpha = 4 with lr/10
// Presets differ only in the normalization modes and the schedule.
struct RunConfig {
    // dataset
    std::string dataset_kind = "blobs";  // "blobs" | "mnist"
    std::string mnist_dir = "data/mnist";
    std::size_t mnist_train_limit = 50000;
    BlobSpec blobs;

    // model
    std::vector<std::size_t> hidden = {128, 64};
    std::size_t embedding_dim = 16;
    EmbedNorm embed_norm = EmbedNorm::l2;
    WeightNorm weight_norm = WeightNorm::l2;

    TemperatureSchedule schedule = TemperatureSchedule::single_phase(16.0, 0.05, 30);

    double momentum = 0.9;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string preset;  // name used to build this config, if any

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);

    // Rewrites the normalization modes and schedule for the named preset,
    // keeping everything else. Throws ArgumentError for unknown names and
    // lists the valid ones.
    void apply_preset(const std::string& name, double base_lr = 0.05,
                      std::size_t epochs_main = 30, std::size_t epochs_fine = 20);

    void validate() const;
};

// Materializes the configured dataset: generated blobs, or the MNIST IDX
// pair under mnist_dir (first mnist_train_limit training samples, full
// official test set, shared classes).
Dataset make_dataset(const RunConfig& cfg);

// Architecture for this config on this dataset.
ArchDescriptor make_arch(const RunConfig& cfg, const Dataset& ds);

}  // namespace heatup
