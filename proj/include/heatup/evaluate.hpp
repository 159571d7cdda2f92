#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "heatup/rng.hpp"
#include "heatup/tensor.hpp"

namespace heatup {

struct EmbeddingSet {
    Tensor2D embeddings;      // n x k
    std::vector<int> labels;  // length n
    bool normalized = false;

    std::size_t size() const { return embeddings.rows(); }
    std::size_t dim() const { return embeddings.cols(); }
};

// Row-wise L2 normalization ahead of any metric; idempotent.
EmbeddingSet normalize_for_eval(const EmbeddingSet& set);

struct KmeansResult {
    std::vector<int> assignment;
    Tensor2D centers;
    double inertia = 0.0;
    std::vector<double> inertia_per_iter;  // one entry per assignment pass
    std::size_t iterations = 0;
};

// k-means++ seeding from the given generator, then Lloyd iterations until
// the assignment reaches a fixpoint or max_iters. An empty cluster is
// re-seeded to the point currently farthest from its assigned center.
KmeansResult kmeans(const Tensor2D& points, std::size_t n_clusters, Rng& rng,
                    std::size_t max_iters = 300);

// Normalized mutual information 2*I(A;B) / (H(A) + H(B)) with natural-log
// entropies over empirical counts. Both-constant partitions (the 0/0 case)
// score 1; otherwise the formula applies directly. Symmetric and invariant
// to relabeling either argument.
double nmi(std::span<const int> a, std::span<const int> b);

// Recall@K by Euclidean distance. The search pool is the set itself minus
// the query unless a gallery is given. Ties break by ascending index; a
// query is recalled at K when any of its K nearest shares its class.
std::map<std::size_t, double> recall_at_k(const EmbeddingSet& set,
                                          const std::vector<std::size_t>& ks,
                                          const EmbeddingSet* gallery = nullptr);

struct CompactnessReport {
    double intra_class_cosine_mean = 0.0;        // mean over classes of mean pairwise cosine
    double inter_class_center_cosine_mean = 0.0; // mean pairwise cosine of class mean directions
    std::size_t skipped_classes = 0;             // classes with < 2 members, excluded from intra
};

// Requires a normalized set with at least two classes.
CompactnessReport compactness_report(const EmbeddingSet& set);

struct EvalReport {
    double nmi = 0.0;
    std::map<std::size_t, double> recall;
    double intra_cosine = 0.0;
    double inter_cosine = 0.0;
    std::size_t n_clusters = 0;

    nlohmann::json to_json() const;
};

// The whole protocol: normalize, cluster into #classes, score NMI against
// labels, recall at the requested Ks, compactness diagnostics.
EvalReport evaluate_embeddings(const EmbeddingSet& set, const std::vector<std::size_t>& ks,
                               Rng& rng);

}  // namespace heatup
