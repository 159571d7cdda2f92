#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "heatup/loss_head.hpp"
#include "heatup/tensor.hpp"

namespace heatup {

// Sample taxonomy by classification margin z_y - max_{m != y} z_m:
// hard when the margin is <= 0 (ties count as hard), boundary when it is
// positive but below tau, centroid at tau and above.
enum class SampleType { hard, boundary, centroid };

std::string to_string(SampleType t);

struct SampleClassification {
    SampleType type;
    double margin;
};

SampleClassification classify_sample(const ClassifierHead& head,
                                     std::span<const double> f_hat_row, int label, double tau);

struct SweepCurve {
    std::string variable;  // "alpha" or "norm_scale"
    std::size_t sample_id = 0;
    SampleType type = SampleType::hard;
    std::vector<double> grid;    // strictly ascending
    std::vector<double> values;  // gradient magnitudes, same length
};

// Gradient magnitude per sample across an ascending positive alpha grid.
// Read-only over the head.
std::vector<SweepCurve> alpha_sweep(const ClassifierHead& head, const Tensor2D& f_hat_rows,
                                    std::span<const int> labels,
                                    std::span<const std::size_t> sample_ids,
                                    std::span<const double> grid, double tau);

// ||dL/df|| at f = s * f0/||f0|| over a grid of scales s, evaluated at
// alpha = 1 on a head trained without weight normalization.
SweepCurve norm_sweep(const ClassifierHead& head, std::span<const double> f_row, int label,
                      std::size_t sample_id, std::span<const double> grid, double tau);

struct TypeCensus {
    std::size_t hard = 0;
    std::size_t boundary = 0;
    std::size_t centroid = 0;
    double tau = 0.0;

    std::size_t total() const { return hard + boundary + centroid; }
    double hard_fraction() const;
};

TypeCensus type_census(const ClassifierHead& head, const Tensor2D& f_hat_rows,
                       std::span<const int> labels, double tau);

// Default boundary/centroid threshold: the 50th percentile (linearly
// interpolated) of the positive margins over the dataset; 0 when no sample
// has a positive margin.
double default_tau(const ClassifierHead& head, const Tensor2D& f_hat_rows,
                   std::span<const int> labels);

// CSV: sample_id,type,grid_value,grad_magnitude, rows ordered by sample id
// then grid value.
std::string sweep_csv(std::span<const SweepCurve> curves);

// Inverse of sweep_csv: groups rows back into one curve per sample id.
std::vector<SweepCurve> parse_sweep_csv(const std::string& text);

}  // namespace heatup
