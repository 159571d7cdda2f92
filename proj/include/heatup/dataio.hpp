#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "heatup/batch.hpp"
#include "heatup/evaluate.hpp"

namespace heatup {

enum class SplitMode { shared_classes, disjoint_classes };

std::string to_string(SplitMode m);
SplitMode split_mode_from_string(const std::string& s);

struct Dataset {
    SampleBatch train;
    SampleBatch test;
    std::size_t class_count = 0;
    SplitMode split_mode = SplitMode::shared_classes;
};

// Gaussian blobs around unit-direction class centers with a minimum
// pairwise center angle. The desk-scale stand-in for a labeled benchmark.
struct BlobSpec {
    std::size_t classes = 16;
    std::size_t dim = 32;
    std::size_t per_class = 100;
    double min_angle_deg = 60.0;
    double sigma = 0.12;
    std::uint64_t seed = 1;
    SplitMode split = SplitMode::disjoint_classes;
    double train_fraction = 0.5;  // shared_classes only
};

// Centers by rejection sampling under the angle constraint, then points =
// center + N(0, sigma^2 I). Disjoint mode sends the first half of the
// classes to train and the rest to test (label values keep their identity,
// so the two label sets never overlap). Deterministic given the seed.
Dataset gen_blobs(const BlobSpec& spec);

// Big-endian IDX pair: images with magic 0x00000803 and dims (n, rows,
// cols) flattened to n x rows*cols and scaled to [0,1]; labels with magic
// 0x00000801. Wrong magic, truncation and count mismatch raise distinct
// errors carrying byte offsets.
SampleBatch load_idx(const std::string& images_path, const std::string& labels_path);

// Inverse of load_idx for fixtures and synthetic corpora: clamps features
// to [0,1] and quantizes to bytes.
void write_idx(const SampleBatch& batch, std::size_t img_rows, std::size_t img_cols,
               const std::string& images_path, const std::string& labels_path);

// CSV columns label,e0,...,e{k-1} with 17-significant-digit floats, so a
// round trip through import reproduces every bit.
void export_embeddings_csv(const EmbeddingSet& set, const std::string& path);
void export_embeddings_json(const EmbeddingSet& set, const std::string& path);
EmbeddingSet import_embeddings_csv(const std::string& path);

}  // namespace heatup
