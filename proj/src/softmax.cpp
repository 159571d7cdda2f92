#include "heatup/softmax.hpp"

#include <algorithm>
#include <cmath>

#include "heatup/errors.hpp"

namespace heatup {

double logsumexp(std::span<const double> v) {
    if (v.empty()) throw ArgumentError("logsumexp: empty input");
    double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

std::vector<double> softmax_temp(std::span<const double> z, double alpha) {
    if (alpha <= 0.0) throw ArgumentError("softmax_temp: alpha must be > 0, got " + std::to_string(alpha));
    if (z.empty()) throw ArgumentError("softmax_temp: empty input");
    std::vector<double> scaled(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) scaled[i] = alpha * z[i];
    double lse = logsumexp(scaled);
    std::vector<double> p(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) p[i] = std::exp(scaled[i] - lse);
    return p;
}

std::vector<double> log_softmax_temp(std::span<const double> z, double alpha) {
    if (alpha <= 0.0) throw ArgumentError("log_softmax_temp: alpha must be > 0, got " + std::to_string(alpha));
    if (z.empty()) throw ArgumentError("log_softmax_temp: empty input");
    std::vector<double> scaled(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) scaled[i] = alpha * z[i];
    double lse = logsumexp(scaled);
    for (double& x : scaled) x -= lse;
    return scaled;
}

}  // namespace heatup
