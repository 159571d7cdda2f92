#include "heatup/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "heatup/errors.hpp"

namespace heatup {

namespace {

constexpr const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

const char* color_for(std::size_t idx) { return kPalette[idx % 10]; }

}  // namespace

std::string scatter_svg(const EmbeddingSet& set, const Tensor2D* weight_dirs) {
    if (set.size() > 0 && set.dim() != 2)
        throw ArgumentError("scatter_svg: needs 2-D embeddings, got k = " +
                            std::to_string(set.dim()));
    if (weight_dirs && weight_dirs->rows() != 2)
        throw ArgumentError("scatter_svg: weight directions must be 2 x M");

    const double w = 640.0, h = 640.0, margin = 40.0;
    double radius = 1.0;
    for (std::size_t i = 0; i < set.size(); ++i)
        radius = std::max(radius, l2_norm(set.embeddings.row_span(i)));
    radius *= 1.05;

    auto px = [&](double x) { return margin + (x + radius) / (2.0 * radius) * (w - 2.0 * margin); };
    auto py = [&](double y) { return h - margin - (y + radius) / (2.0 * radius) * (h - 2.0 * margin); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
           "viewBox=\"0 0 640 640\">\n";
    svg += "<rect x=\"" + num(margin) + "\" y=\"" + num(margin) + "\" width=\"" +
           num(w - 2 * margin) + "\" height=\"" + num(h - 2 * margin) +
           "\" fill=\"white\" stroke=\"#333333\"/>\n";
    svg += "<line x1=\"" + num(px(-radius)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" +
           num(px(radius)) + "\" y2=\"" + num(py(0)) + "\" stroke=\"#cccccc\"/>\n";
    svg += "<line x1=\"" + num(px(0)) + "\" y1=\"" + num(py(-radius)) + "\" x2=\"" +
           num(px(0)) + "\" y2=\"" + num(py(radius)) + "\" stroke=\"#cccccc\"/>\n";

    for (std::size_t i = 0; i < set.size(); ++i) {
        int label = set.labels[i];
        svg += "<circle cx=\"" + num(px(set.embeddings(i, 0))) + "\" cy=\"" +
               num(py(set.embeddings(i, 1))) + "\" r=\"2.00\" fill=\"" +
               color_for(static_cast<std::size_t>(label < 0 ? 0 : label)) + "\"/>\n";
    }

    if (weight_dirs) {
        for (std::size_t m = 0; m < weight_dirs->cols(); ++m) {
            double wx = (*weight_dirs)(0, m), wy = (*weight_dirs)(1, m);
            double n = std::sqrt(wx * wx + wy * wy);
            if (n <= 0.0) continue;
            // unit direction, pulled toward the origin for readability
            double sx = wx / n * radius * 0.85, sy = wy / n * radius * 0.85;
            double cx = px(sx), cy = py(sy), d = 6.0;
            svg += "<polygon points=\"" + num(cx) + "," + num(cy - d) + " " + num(cx + d) + "," +
                   num(cy) + " " + num(cx) + "," + num(cy + d) + " " + num(cx - d) + "," +
                   num(cy) + "\" fill=\"" + color_for(m) +
                   "\" stroke=\"#000000\" class=\"weight\"/>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

std::string sweep_svg(std::span<const SweepCurve> curves) {
    const double w = 640.0, h = 480.0, margin = 50.0;
    double x_lo = 1.0, x_hi = 10.0, y_hi = 1.0;
    bool have = false;
    for (const auto& c : curves) {
        for (double g : c.grid) {
            double lg = std::log10(g);
            if (!have) {
                x_lo = x_hi = lg;
            } else {
                x_lo = std::min(x_lo, lg);
                x_hi = std::max(x_hi, lg);
            }
            have = true;
        }
        for (double v : c.values) y_hi = std::max(y_hi, v);
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    y_hi *= 1.05;

    auto px = [&](double g) {
        return margin + (std::log10(g) - x_lo) / (x_hi - x_lo) * (w - 2.0 * margin);
    };
    auto py = [&](double v) { return h - margin - v / y_hi * (h - 2.0 * margin); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg += "<rect x=\"" + num(margin) + "\" y=\"" + num(margin) + "\" width=\"" +
           num(w - 2 * margin) + "\" height=\"" + num(h - 2 * margin) +
           "\" fill=\"white\" stroke=\"#333333\"/>\n";
    std::size_t idx = 0;
    for (const auto& c : curves) {
        std::string pts;
        for (std::size_t g = 0; g < c.grid.size(); ++g) {
            if (g) pts += " ";
            pts += num(px(c.grid[g])) + "," + num(py(c.values[g]));
        }
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color_for(idx) +
               "\" stroke-width=\"1.5\" data-sample=\"" + std::to_string(c.sample_id) +
               "\" data-type=\"" + to_string(c.type) + "\"/>\n";
        ++idx;
    }
    svg += "<text x=\"" + num(margin) + "\" y=\"" + num(h - margin + 16.0) +
           "\" font-family=\"monospace\" font-size=\"11\">" + num(std::pow(10.0, x_lo)) +
           "</text>\n";
    svg += "<text x=\"" + num(w - margin - 30.0) + "\" y=\"" + num(h - margin + 16.0) +
           "\" font-family=\"monospace\" font-size=\"11\">" + num(std::pow(10.0, x_hi)) +
           "</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace heatup
