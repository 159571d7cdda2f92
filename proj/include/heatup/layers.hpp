#pragma once

#include <cstddef>
#include <vector>

#include "heatup/tensor.hpp"

namespace heatup {

// Affine map y = x * W + b on row batches. W is in_dim x out_dim so rows
// stay samples. forward() caches the input for backward(); backward()
// accumulates into the grad buffers (call zero_grad between steps).
class LinearLayer {
public:
    LinearLayer(std::size_t in_dim, std::size_t out_dim, bool with_bias);

    Tensor2D forward(const Tensor2D& x);
    Tensor2D infer(const Tensor2D& x) const;  // pure, no caching
    // Accumulates dL/dW = x^T * grad_out and dL/db = colsum(grad_out);
    // returns grad_out * W^T.
    Tensor2D backward(const Tensor2D& grad_out);
    void zero_grad();

    std::size_t in_dim() const { return weight.rows(); }
    std::size_t out_dim() const { return weight.cols(); }
    bool has_bias() const { return !bias.empty(); }

    Tensor2D weight;
    std::vector<double> bias;  // empty when the layer has no bias
    Tensor2D grad_weight;
    std::vector<double> grad_bias;

private:
    Tensor2D cached_input_;
    bool have_cache_ = false;
};

class ReluLayer {
public:
    Tensor2D forward(const Tensor2D& x);
    Tensor2D infer(const Tensor2D& x) const;
    Tensor2D backward(const Tensor2D& grad_out);

private:
    std::vector<unsigned char> mask_;
    std::size_t rows_ = 0, cols_ = 0;
    bool have_cache_ = false;
};

// Row-wise L2 normalization f_hat = f / ||f||_2.
//
// The backward pass applies the Jacobian J = (I - f_hat f_hat^T) / ||f||_2
// row by row: grad_in = (g - (g . f_hat) f_hat) / ||f||, which is always
// orthogonal to the input row and shrinks as 1/||f||.
class L2NormLayer {
public:
    explicit L2NormLayer(double epsilon = 1e-12) : epsilon_(epsilon) {}

    Tensor2D forward(const Tensor2D& f);
    Tensor2D infer(const Tensor2D& f) const;
    Tensor2D backward(const Tensor2D& grad_out);

    double epsilon() const { return epsilon_; }

private:
    double epsilon_;
    std::vector<double> cached_norms_;
    Tensor2D cached_output_;
    bool have_cache_ = false;
};

// Batch normalization without learned scale or shift, followed by a fixed
// division by sqrt(k). Train mode standardizes each dimension with the
// biased batch variance and updates running statistics with momentum;
// infer mode standardizes with the running statistics only.
class BatchNormNoScale {
public:
    enum class Mode { train, infer };

    BatchNormNoScale(std::size_t k, double epsilon = 1e-5, double momentum = 0.9);

    Tensor2D forward(const Tensor2D& f);
    // Exact gradient through the batch statistics and the sqrt(k) division.
    // Only valid after a train-mode forward.
    Tensor2D backward(const Tensor2D& grad_out);

    void set_mode(Mode m) { mode_ = m; }
    Mode mode() const { return mode_; }
    std::size_t dim() const { return running_mean.size(); }
    double epsilon() const { return epsilon_; }
    double momentum() const { return momentum_; }

    std::vector<double> running_mean;
    std::vector<double> running_var;

private:
    double epsilon_;
    double momentum_;
    Mode mode_ = Mode::train;
    Tensor2D cached_xhat_;            // standardized values (before /sqrt(k))
    std::vector<double> cached_inv_std_;
    bool have_train_cache_ = false;
};

}  // namespace heatup
