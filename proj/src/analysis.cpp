#include "heatup/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "heatup/errors.hpp"
#include "heatup/threads.hpp"

namespace heatup {

namespace {

double margin_of(const ClassifierHead& head, std::span<const double> f_hat_row, int label) {
    Tensor2D w_hat = head.normalized_weight();
    const std::size_t m_count = head.num_classes();
    if (label < 0 || static_cast<std::size_t>(label) >= m_count)
        throw ArgumentError("classify_sample: label out of range");
    double zy = 0.0, z_other_max = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < m_count; ++m) {
        double z = 0.0;
        for (std::size_t i = 0; i < head.embed_dim(); ++i) z += f_hat_row[i] * w_hat(i, m);
        if (head.has_bias()) z += head.bias[m];
        if (static_cast<int>(m) == label)
            zy = z;
        else
            z_other_max = std::max(z_other_max, z);
    }
    return zy - z_other_max;
}

void check_grid(std::span<const double> grid) {
    if (grid.empty()) throw ArgumentError("sweep: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= 0.0) throw ArgumentError("sweep: grid values must be > 0");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw ArgumentError("sweep: grid must be strictly ascending");
    }
}

}  // namespace

std::string to_string(SampleType t) {
    switch (t) {
        case SampleType::hard: return "hard";
        case SampleType::boundary: return "boundary";
        case SampleType::centroid: return "centroid";
    }
    return "?";
}

SampleClassification classify_sample(const ClassifierHead& head,
                                     std::span<const double> f_hat_row, int label, double tau) {
    double margin = margin_of(head, f_hat_row, label);
    SampleType t;
    if (margin <= 0.0)
        t = SampleType::hard;
    else if (margin < tau)
        t = SampleType::boundary;
    else
        t = SampleType::centroid;
    return {t, margin};
}

std::vector<SweepCurve> alpha_sweep(const ClassifierHead& head, const Tensor2D& f_hat_rows,
                                    std::span<const int> labels,
                                    std::span<const std::size_t> sample_ids,
                                    std::span<const double> grid, double tau) {
    check_grid(grid);
    if (f_hat_rows.rows() != labels.size() || f_hat_rows.rows() != sample_ids.size())
        throw ArgumentError("alpha_sweep: rows/labels/ids length mismatch");
    std::vector<SweepCurve> curves(f_hat_rows.rows());
    parallel_for(f_hat_rows.rows(), 1, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            SweepCurve& c = curves[i];
            c.variable = "alpha";
            c.sample_id = sample_ids[i];
            c.type = classify_sample(head, f_hat_rows.row_span(i), labels[i], tau).type;
            c.grid.assign(grid.begin(), grid.end());
            c.values.resize(grid.size());
            for (std::size_t g = 0; g < grid.size(); ++g)
                c.values[g] = gradient_magnitude(head, f_hat_rows.row_span(i), labels[i], grid[g]);
        }
    });
    return curves;
}

SweepCurve norm_sweep(const ClassifierHead& head, std::span<const double> f_row, int label,
                      std::size_t sample_id, std::span<const double> grid, double tau) {
    if (head.weight_norm != WeightNorm::off)
        throw ArgumentError("norm_sweep: defined for heads trained without weight normalization");
    check_grid(grid);
    double n = l2_norm(f_row);
    if (n <= 0.0) throw DegenerateInputError("norm_sweep: zero feature vector");

    SweepCurve c;
    c.variable = "norm_scale";
    c.sample_id = sample_id;
    c.type = classify_sample(head, f_row, label, tau).type;
    c.grid.assign(grid.begin(), grid.end());
    c.values.resize(grid.size());
    std::vector<double> scaled(f_row.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double s = grid[g] / n;
        for (std::size_t j = 0; j < f_row.size(); ++j) scaled[j] = s * f_row[j];
        c.values[g] = gradient_magnitude(head, scaled, label, 1.0);
    }
    return c;
}

double TypeCensus::hard_fraction() const {
    return total() == 0 ? 0.0 : static_cast<double>(hard) / static_cast<double>(total());
}

TypeCensus type_census(const ClassifierHead& head, const Tensor2D& f_hat_rows,
                       std::span<const int> labels, double tau) {
    if (f_hat_rows.rows() != labels.size())
        throw ArgumentError("type_census: rows/labels length mismatch");
    TypeCensus census;
    census.tau = tau;
    for (std::size_t i = 0; i < f_hat_rows.rows(); ++i) {
        switch (classify_sample(head, f_hat_rows.row_span(i), labels[i], tau).type) {
            case SampleType::hard: ++census.hard; break;
            case SampleType::boundary: ++census.boundary; break;
            case SampleType::centroid: ++census.centroid; break;
        }
    }
    return census;
}

double default_tau(const ClassifierHead& head, const Tensor2D& f_hat_rows,
                   std::span<const int> labels) {
    std::vector<double> positive;
    for (std::size_t i = 0; i < f_hat_rows.rows(); ++i) {
        double m = margin_of(head, f_hat_rows.row_span(i), labels[i]);
        if (m > 0.0) positive.push_back(m);
    }
    if (positive.empty()) return 0.0;
    std::sort(positive.begin(), positive.end());
    double pos = 0.5 * static_cast<double>(positive.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 < positive.size())
        return positive[lo] * (1.0 - frac) + positive[lo + 1] * frac;
    return positive[lo];
}

std::vector<SweepCurve> parse_sweep_csv(const std::string& text) {
    std::vector<SweepCurve> curves;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line != "sample_id,type,grid_value,grad_magnitude")
                throw ParseError("sweep CSV: unexpected header '" + line + "'", 0);
            continue;
        }
        std::size_t c1 = line.find(','), c2 = line.find(',', c1 + 1), c3 = line.find(',', c2 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos || c3 == std::string::npos)
            throw ParseError("sweep CSV: malformed row '" + line + "'", pos);
        std::size_t id = std::stoull(line.substr(0, c1));
        std::string type_str = line.substr(c1 + 1, c2 - c1 - 1);
        double grid_v = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
        double value = std::stod(line.substr(c3 + 1));
        SampleType type;
        if (type_str == "hard")
            type = SampleType::hard;
        else if (type_str == "boundary")
            type = SampleType::boundary;
        else if (type_str == "centroid")
            type = SampleType::centroid;
        else
            throw ParseError("sweep CSV: unknown type '" + type_str + "'", pos);
        if (curves.empty() || curves.back().sample_id != id) {
            SweepCurve c;
            c.sample_id = id;
            c.type = type;
            curves.push_back(std::move(c));
        }
        curves.back().grid.push_back(grid_v);
        curves.back().values.push_back(value);
    }
    return curves;
}

std::string sweep_csv(std::span<const SweepCurve> curves) {
    std::vector<const SweepCurve*> sorted;
    for (const auto& c : curves) sorted.push_back(&c);
    std::sort(sorted.begin(), sorted.end(),
              [](const SweepCurve* a, const SweepCurve* b) { return a->sample_id < b->sample_id; });
    std::string out = "sample_id,type,grid_value,grad_magnitude\n";
    char buf[128];
    for (const SweepCurve* c : sorted) {
        for (std::size_t g = 0; g < c->grid.size(); ++g) {
            std::snprintf(buf, sizeof(buf), "%zu,%s,%.17g,%.17g\n", c->sample_id,
                          to_string(c->type).c_str(), c->grid[g], c->values[g]);
            out += buf;
        }
    }
    return out;
}

}  // namespace heatup
