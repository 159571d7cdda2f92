#include "heatup/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "heatup/errors.hpp"
#include "heatup/threads.hpp"

namespace heatup {

EmbeddingSet normalize_for_eval(const EmbeddingSet& set) {
    EmbeddingSet out = set;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double n = l2_norm(out.embeddings.row_span(i));
        if (n <= 0.0)
            throw DegenerateInputError("normalize_for_eval: zero row " + std::to_string(i));
        double inv = 1.0 / n;
        double* r = out.embeddings.row(i);
        for (std::size_t j = 0; j < out.dim(); ++j) r[j] *= inv;
    }
    out.normalized = true;
    return out;
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t k) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

}  // namespace

KmeansResult kmeans(const Tensor2D& points, std::size_t n_clusters, Rng& rng,
                    std::size_t max_iters) {
    const std::size_t n = points.rows(), k = points.cols();
    if (n_clusters == 0) throw ArgumentError("kmeans: n_clusters must be >= 1");
    if (n_clusters > n)
        throw ArgumentError("kmeans: n_clusters " + std::to_string(n_clusters) + " > points " +
                            std::to_string(n));
    if (max_iters < 1) throw ArgumentError("kmeans: max_iters must be >= 1");

    KmeansResult res;
    res.centers = Tensor2D(n_clusters, k);

    // k-means++ seeding.
    std::vector<double> min_d2(n, 0.0);
    std::size_t first = rng.next_below(n);
    for (std::size_t j = 0; j < k; ++j) res.centers(0, j) = points(first, j);
    for (std::size_t i = 0; i < n; ++i) min_d2[i] = sq_dist(points.row(i), res.centers.row(0), k);
    for (std::size_t c = 1; c < n_clusters; ++c) {
        double total = std::accumulate(min_d2.begin(), min_d2.end(), 0.0);
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.next_below(n);  // all points coincide with some center
        } else {
            double r = rng.next_double() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += min_d2[i];
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
        }
        for (std::size_t j = 0; j < k; ++j) res.centers(c, j) = points(pick, j);
        for (std::size_t i = 0; i < n; ++i)
            min_d2[i] = std::min(min_d2[i], sq_dist(points.row(i), res.centers.row(c), k));
    }

    res.assignment.assign(n, -1);
    std::vector<int> prev(n, -2);
    std::vector<std::size_t> counts(n_clusters, 0);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        // Assignment pass; ties go to the lowest cluster index.
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = sq_dist(points.row(i), res.centers.row(0), k);
            int best_c = 0;
            for (std::size_t c = 1; c < n_clusters; ++c) {
                double d = sq_dist(points.row(i), res.centers.row(c), k);
                if (d < best) {
                    best = d;
                    best_c = static_cast<int>(c);
                }
            }
            res.assignment[i] = best_c;
            inertia += best;
        }
        res.inertia_per_iter.push_back(inertia);
        res.inertia = inertia;
        res.iterations = iter + 1;
        if (res.assignment == prev) break;
        prev = res.assignment;

        // Update pass.
        res.centers.fill(0.0);
        counts.assign(n_clusters, 0);
        for (std::size_t i = 0; i < n; ++i) {
            double* c = res.centers.row(res.assignment[i]);
            const double* p = points.row(i);
            for (std::size_t j = 0; j < k; ++j) c[j] += p[j];
            ++counts[res.assignment[i]];
        }
        std::vector<std::size_t> taken;
        for (std::size_t c = 0; c < n_clusters; ++c) {
            if (counts[c] > 0) {
                double inv = 1.0 / static_cast<double>(counts[c]);
                double* cr = res.centers.row(c);
                for (std::size_t j = 0; j < k; ++j) cr[j] *= inv;
            } else {
                // Re-seed to the point farthest from its assigned center,
                // skipping points already claimed by another empty cluster.
                std::size_t worst = 0;
                double worst_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (std::find(taken.begin(), taken.end(), i) != taken.end()) continue;
                    std::size_t a = static_cast<std::size_t>(res.assignment[i]);
                    double d = counts[a] > 0
                                   ? sq_dist(points.row(i), res.centers.row(a), k)
                                   : 0.0;
                    if (d > worst_d) {
                        worst_d = d;
                        worst = i;
                    }
                }
                taken.push_back(worst);
                for (std::size_t j = 0; j < k; ++j) res.centers(c, j) = points(worst, j);
            }
        }
    }
    return res;
}

double nmi(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size())
        throw ArgumentError("nmi: length mismatch " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
    if (a.empty()) throw ArgumentError("nmi: empty input");
    const double n = static_cast<double>(a.size());

    std::map<int, std::size_t> ca, cb;
    std::map<std::pair<int, int>, std::size_t> cj;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++ca[a[i]];
        ++cb[b[i]];
        ++cj[{a[i], b[i]}];
    }
    auto entropy = [n](const std::map<int, std::size_t>& counts) {
        double h = 0.0;
        for (const auto& [_, c] : counts) {
            double p = static_cast<double>(c) / n;
            h -= p * std::log(p);
        }
        return h;
    };
    double ha = entropy(ca), hb = entropy(cb);
    if (ha + hb == 0.0) return 1.0;  // both partitions constant, hence identical
    double mi = 0.0;
    for (const auto& [key, c] : cj) {
        double pj = static_cast<double>(c) / n;
        double pa = static_cast<double>(ca[key.first]) / n;
        double pb = static_cast<double>(cb[key.second]) / n;
        mi += pj * std::log(pj / (pa * pb));
    }
    double v = 2.0 * mi / (ha + hb);
    return std::clamp(v, 0.0, 1.0);
}

std::map<std::size_t, double> recall_at_k(const EmbeddingSet& set,
                                          const std::vector<std::size_t>& ks,
                                          const EmbeddingSet* gallery) {
    if (ks.empty()) throw ArgumentError("recall_at_k: no K values");
    const EmbeddingSet& pool = gallery ? *gallery : set;
    const bool self_pool = gallery == nullptr;
    const std::size_t n_query = set.size();
    if (n_query == 0) throw ArgumentError("recall_at_k: empty query set");
    if (self_pool && n_query < 2)
        throw ArgumentError("recall_at_k: need >= 2 samples when the set is its own pool");
    // Candidates per query: the set minus the query itself, or the gallery.
    const std::size_t candidates = self_pool ? pool.size() - 1 : pool.size();
    std::size_t max_k = *std::max_element(ks.begin(), ks.end());
    if (max_k == 0) throw ArgumentError("recall_at_k: K must be >= 1");
    if (max_k > candidates)
        throw ArgumentError("recall_at_k: K " + std::to_string(max_k) +
                            " exceeds search pool of " + std::to_string(candidates));
    if (gallery && gallery->dim() != set.dim())
        throw ArgumentError("recall_at_k: gallery dim mismatch");

    std::vector<std::size_t> sorted_ks = ks;
    std::sort(sorted_ks.begin(), sorted_ks.end());

    // hit_counts[j] = queries recalled within sorted_ks[j] neighbors.
    std::vector<std::size_t> hit_counts(sorted_ks.size(), 0);
    std::vector<std::vector<std::size_t>> per_query_hits(n_query);

    parallel_for(n_query, 16, [&](std::size_t q0, std::size_t q1) {
        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t q = q0; q < q1; ++q) {
            dist.clear();
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (self_pool && i == q) continue;
                dist.emplace_back(sq_dist(set.embeddings.row(q), pool.embeddings.row(i), set.dim()),
                                  i);
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(max_k),
                              dist.end());
            per_query_hits[q].assign(sorted_ks.size(), 0);
            bool found = false;
            std::size_t ki = 0;
            for (std::size_t r = 0; r < max_k; ++r) {
                if (!found && pool.labels[dist[r].second] == set.labels[q]) found = true;
                while (ki < sorted_ks.size() && r + 1 == sorted_ks[ki]) {
                    per_query_hits[q][ki] = found ? 1 : 0;
                    ++ki;
                }
            }
        }
    });
    for (std::size_t q = 0; q < n_query; ++q)
        for (std::size_t j = 0; j < sorted_ks.size(); ++j) hit_counts[j] += per_query_hits[q][j];

    std::map<std::size_t, double> out;
    for (std::size_t j = 0; j < sorted_ks.size(); ++j)
        out[sorted_ks[j]] = static_cast<double>(hit_counts[j]) / static_cast<double>(n_query);
    return out;
}

CompactnessReport compactness_report(const EmbeddingSet& set) {
    if (!set.normalized) throw ArgumentError("compactness_report: set must be normalized");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < set.size(); ++i) by_class[set.labels[i]].push_back(i);
    if (by_class.size() < 2) throw ArgumentError("compactness_report: need >= 2 classes");

    CompactnessReport rep;
    double intra_sum = 0.0;
    std::size_t intra_classes = 0;
    Tensor2D centers(by_class.size(), set.dim());
    std::size_t ci = 0;
    for (const auto& [label, idx] : by_class) {
        double* c = centers.row(ci++);
        for (std::size_t i : idx) {
            const double* r = set.embeddings.row(i);
            for (std::size_t j = 0; j < set.dim(); ++j) c[j] += r[j];
        }
        double inv = 1.0 / static_cast<double>(idx.size());
        for (std::size_t j = 0; j < set.dim(); ++j) c[j] *= inv;

        if (idx.size() < 2) {
            ++rep.skipped_classes;
            continue;
        }
        double pair_sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t p = 0; p < idx.size(); ++p)
            for (std::size_t q = p + 1; q < idx.size(); ++q) {
                pair_sum += dot(set.embeddings.row_span(idx[p]), set.embeddings.row_span(idx[q]));
                ++pairs;
            }
        intra_sum += pair_sum / static_cast<double>(pairs);
        ++intra_classes;
    }
    if (intra_classes == 0)
        throw ArgumentError("compactness_report: every class has < 2 members");
    rep.intra_class_cosine_mean = intra_sum / static_cast<double>(intra_classes);

    for (std::size_t c = 0; c < centers.rows(); ++c) {
        double nrm = l2_norm(centers.row_span(c));
        if (nrm <= 0.0)
            throw DegenerateInputError("compactness_report: zero class-mean vector");
        double* r = centers.row(c);
        for (std::size_t j = 0; j < set.dim(); ++j) r[j] /= nrm;
    }
    double inter_sum = 0.0;
    std::size_t inter_pairs = 0;
    for (std::size_t p = 0; p < centers.rows(); ++p)
        for (std::size_t q = p + 1; q < centers.rows(); ++q) {
            inter_sum += dot(centers.row_span(p), centers.row_span(q));
            ++inter_pairs;
        }
    rep.inter_class_center_cosine_mean = inter_sum / static_cast<double>(inter_pairs);
    return rep;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json rec = nlohmann::json::object();
    for (const auto& [k, v] : recall) rec[std::to_string(k)] = v;
    return {{"nmi", nmi},
            {"recall", rec},
            {"intra_cosine", intra_cosine},
            {"inter_cosine", inter_cosine},
            {"n_clusters", n_clusters}};
}

EvalReport evaluate_embeddings(const EmbeddingSet& set, const std::vector<std::size_t>& ks,
                               Rng& rng) {
    EmbeddingSet normed = set.normalized ? set : normalize_for_eval(set);
    std::set<int> classes(normed.labels.begin(), normed.labels.end());
    EvalReport rep;
    rep.n_clusters = classes.size();
    KmeansResult km = kmeans(normed.embeddings, rep.n_clusters, rng);
    rep.nmi = nmi(km.assignment, normed.labels);
    rep.recall = recall_at_k(normed, ks);
    CompactnessReport comp = compactness_report(normed);
    rep.intra_cosine = comp.intra_class_cosine_mean;
    rep.inter_cosine = comp.inter_class_center_cosine_mean;
    return rep;
}

}  // namespace heatup
