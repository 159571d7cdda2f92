#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "heatup/tensor.hpp"

namespace heatup {

enum class WeightNorm { off, l2 };

// Linear classifier head z = f_hat * W_hat + b with one weight column per
// class. With weight_norm = l2 the columns used in the forward pass are
// L2-normalized copies of the stored weights and the bias is absent; the
// backward pass then routes gradients through the column-normalization
// Jacobian so the raw weights keep training.
//
// alpha is the reciprocal softmax temperature; it is a configuration
// constant of the head, not a learned parameter.
class ClassifierHead {
public:
    ClassifierHead(std::size_t embed_dim, std::size_t num_classes, WeightNorm wn, double alpha);

    // Returns logits and caches the normalized weights plus the input batch.
    Tensor2D logits(const Tensor2D& f_hat);
    Tensor2D logits_infer(const Tensor2D& f_hat) const;  // pure

    // Returns dL/df_hat = grad_z * W_hat^T and accumulates the weight (and
    // bias) gradients. Requires a prior logits() call.
    Tensor2D grad_embedding(const Tensor2D& grad_z);

    // Copy of W with unit-norm columns when weight_norm = l2, plain copy otherwise.
    Tensor2D normalized_weight() const;

    void zero_grad();

    std::size_t embed_dim() const { return weight.rows(); }
    std::size_t num_classes() const { return weight.cols(); }
    bool has_bias() const { return !bias.empty(); }

    Tensor2D weight;  // k x M, column m is the weight of class m
    std::vector<double> bias;
    Tensor2D grad_weight;
    std::vector<double> grad_bias;
    WeightNorm weight_norm;
    double alpha;

private:
    Tensor2D cached_input_;
    Tensor2D cached_w_hat_;
    std::vector<double> cached_w_norms_;
    bool have_cache_ = false;
};

// Mean over the batch of -log p(y_i | z_i, alpha), evaluated through
// log-softmax so saturated logits stay finite.
double ce_loss(const Tensor2D& logits, std::span<const int> labels, double alpha);

// Gradient of ce_loss with respect to the logits: row i is
// alpha * (p_i - onehot(y_i)) / batch_size, matching the mean reduction.
Tensor2D grad_logits(const Tensor2D& logits, std::span<const int> labels, double alpha);

// || alpha * sum_m (p_m - q_m) w_hat_m ||_2 for a single sample, evaluated
// at the given alpha. Pure: mutates nothing, ignores head.alpha.
double gradient_magnitude(const ClassifierHead& head, std::span<const double> f_hat_row,
                          int label, double alpha);

}  // namespace heatup
