#pragma once

#include <cstddef>
#include <vector>

#include "heatup/tensor.hpp"

namespace heatup {

// A batch of samples: one feature row per sample plus integer class labels.
struct SampleBatch {
    Tensor2D x;               // n x d
    std::vector<int> labels;  // length n, values in [0, num_classes)
    std::size_t num_classes = 0;

    std::size_t size() const { return x.rows(); }
    std::size_t dim() const { return x.cols(); }
};

}  // namespace heatup
