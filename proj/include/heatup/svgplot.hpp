#pragma once

#include <span>
#include <string>

#include "heatup/analysis.hpp"
#include "heatup/evaluate.hpp"
#include "heatup/tensor.hpp"

namespace heatup {

// Self-contained scatter plot of 2-D embeddings colored by class. When
// weight directions (2 x M) are given, each class weight is drawn as a
// diamond pulled slightly toward the origin. Output bytes are a pure
// function of the inputs. Requires k = 2.
std::string scatter_svg(const EmbeddingSet& set, const Tensor2D* weight_dirs = nullptr);

// Gradient-magnitude curves on a log-x axis, one polyline per sample id.
std::string sweep_svg(std::span<const SweepCurve> curves);

}  // namespace heatup
