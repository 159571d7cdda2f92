#pragma once

// Test-only oracles: central finite differences and brute-force metric
// implementations, kept independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace oracle {

// Central difference d f / d x[i] with step h, evaluated over a caller-owned
// buffer. f() must read the buffer on every call.
inline std::vector<double> central_diff(const std::function<double()>& f, double* x,
                                        std::size_t n, double h = 1e-5) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        double keep = x[i];
        x[i] = keep + h;
        double fp = f();
        x[i] = keep - h;
        double fm = f();
        x[i] = keep;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// |a - n| / max(1, |a|, |n|)
inline double rel_err(double a, double n) {
    return std::abs(a - n) / std::max({1.0, std::abs(a), std::abs(n)});
}

inline double max_rel_err(std::span<const double> a, std::span<const double> n) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_err(a[i], n[i]));
    return worst;
}

// NMI through the identity I = H(A) + H(B) - H(A,B), a different algebraic
// route than the library's direct joint-term sum.
inline double nmi_brute(std::span<const int> a, std::span<const int> b) {
    const double n = static_cast<double>(a.size());
    auto entropy_of = [n](const std::map<long long, std::size_t>& counts) {
        double h = 0.0;
        for (const auto& [_, c] : counts) {
            double p = static_cast<double>(c) / n;
            h -= p * std::log(p);
        }
        return h;
    };
    std::map<long long, std::size_t> ca, cb, cab;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++ca[a[i]];
        ++cb[b[i]];
        ++cab[static_cast<long long>(a[i]) * 1000003LL + b[i]];
    }
    double ha = entropy_of(ca), hb = entropy_of(cb), hab = entropy_of(cab);
    if (ha + hb == 0.0) return 1.0;
    double mi = ha + hb - hab;
    return 2.0 * mi / (ha + hb);
}

// Recall@K by full stable sort over explicit (distance, index) pairs.
inline double recall_brute(const std::vector<std::vector<double>>& points,
                           const std::vector<int>& labels, std::size_t k) {
    const std::size_t n = points.size();
    std::size_t hits = 0;
    for (std::size_t q = 0; q < n; ++q) {
        std::vector<std::pair<double, std::size_t>> d;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == q) continue;
            double s = 0.0;
            for (std::size_t j = 0; j < points[q].size(); ++j) {
                double diff = points[q][j] - points[i][j];
                s += diff * diff;
            }
            d.emplace_back(s, i);
        }
        std::stable_sort(d.begin(), d.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first < y.first;
            return x.second < y.second;
        });
        for (std::size_t r = 0; r < k; ++r)
            if (labels[d[r].second] == labels[q]) {
                ++hits;
                break;
            }
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace oracle
