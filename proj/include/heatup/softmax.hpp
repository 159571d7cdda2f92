#pragma once

#include <span>
#include <vector>

namespace heatup {

// log(sum(exp(v))) computed as m + log(sum(exp(v - m))) with m = max(v),
// so huge inputs never overflow. Throws ArgumentError on empty input.
double logsumexp(std::span<const double> v);

// Temperature-scaled softmax: p_m = exp(alpha * z_m) / sum_j exp(alpha * z_j),
// with alpha the reciprocal temperature. Computed through logsumexp; the
// result sums to 1 within 1e-12 and every entry lies in [0, 1].
// Throws ArgumentError when alpha <= 0 or z is empty.
std::vector<double> softmax_temp(std::span<const double> z, double alpha);

// log of softmax_temp, same stability properties.
std::vector<double> log_softmax_temp(std::span<const double> z, double alpha);

}  // namespace heatup
