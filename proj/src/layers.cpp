#include "heatup/layers.hpp"

#include <cmath>
#include <string>

#include "heatup/errors.hpp"

namespace heatup {

LinearLayer::LinearLayer(std::size_t in_dim, std::size_t out_dim, bool with_bias)
    : weight(in_dim, out_dim), grad_weight(in_dim, out_dim) {
    if (in_dim == 0 || out_dim == 0)
        throw ArgumentError("LinearLayer: zero-width layer " + std::to_string(in_dim) + "x" +
                            std::to_string(out_dim));
    if (with_bias) {
        bias.assign(out_dim, 0.0);
        grad_bias.assign(out_dim, 0.0);
    }
}

Tensor2D LinearLayer::infer(const Tensor2D& x) const {
    if (x.cols() != in_dim())
        throw ArgumentError("linear_forward: input " + x.shape_str() + " vs weight " +
                            weight.shape_str());
    Tensor2D out = matmul(x, weight);
    if (has_bias()) add_row_vector(out, bias);
    return out;
}

Tensor2D LinearLayer::forward(const Tensor2D& x) {
    Tensor2D out = infer(x);
    cached_input_ = x;
    have_cache_ = true;
    return out;
}

Tensor2D LinearLayer::backward(const Tensor2D& grad_out) {
    if (!have_cache_) throw StateError("linear_backward before forward");
    if (grad_out.cols() != out_dim() || grad_out.rows() != cached_input_.rows())
        throw ArgumentError("linear_backward: grad " + grad_out.shape_str() + " vs output " +
                            std::to_string(cached_input_.rows()) + "x" + std::to_string(out_dim()));
    axpy(1.0, matmul_at_b(cached_input_, grad_out), grad_weight);
    if (has_bias()) {
        std::vector<double> gb = col_sums(grad_out);
        for (std::size_t j = 0; j < gb.size(); ++j) grad_bias[j] += gb[j];
    }
    return matmul_a_bt(grad_out, weight);
}

void LinearLayer::zero_grad() {
    grad_weight.fill(0.0);
    grad_bias.assign(grad_bias.size(), 0.0);
}

Tensor2D ReluLayer::infer(const Tensor2D& x) const {
    Tensor2D out = x;
    double* d = out.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        if (d[i] < 0.0) d[i] = 0.0;
    return out;
}

Tensor2D ReluLayer::forward(const Tensor2D& x) {
    mask_.assign(x.size(), 0);
    rows_ = x.rows();
    cols_ = x.cols();
    Tensor2D out = x;
    double* d = out.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (d[i] > 0.0)
            mask_[i] = 1;
        else
            d[i] = 0.0;
    }
    have_cache_ = true;
    return out;
}

Tensor2D ReluLayer::backward(const Tensor2D& grad_out) {
    if (!have_cache_) throw StateError("relu_backward before forward");
    if (grad_out.rows() != rows_ || grad_out.cols() != cols_)
        throw ArgumentError("relu_backward: grad shape " + grad_out.shape_str());
    Tensor2D out = grad_out;
    double* d = out.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!mask_[i]) d[i] = 0.0;
    return out;
}

Tensor2D L2NormLayer::infer(const Tensor2D& f) const {
    Tensor2D out = f;
    for (std::size_t i = 0; i < f.rows(); ++i) {
        double n = l2_norm(f.row_span(i));
        if (n <= epsilon_)
            throw DegenerateInputError("l2norm: row " + std::to_string(i) + " has norm " +
                                       std::to_string(n) + " <= epsilon");
        double inv = 1.0 / n;
        double* r = out.row(i);
        for (std::size_t j = 0; j < f.cols(); ++j) r[j] *= inv;
    }
    return out;
}

Tensor2D L2NormLayer::forward(const Tensor2D& f) {
    cached_norms_.resize(f.rows());
    for (std::size_t i = 0; i < f.rows(); ++i) {
        double n = l2_norm(f.row_span(i));
        if (n <= epsilon_)
            throw DegenerateInputError("l2norm: row " + std::to_string(i) + " has norm " +
                                       std::to_string(n) + " <= epsilon");
        cached_norms_[i] = n;
    }
    Tensor2D out = f;
    for (std::size_t i = 0; i < f.rows(); ++i) {
        double inv = 1.0 / cached_norms_[i];
        double* r = out.row(i);
        for (std::size_t j = 0; j < f.cols(); ++j) r[j] *= inv;
    }
    cached_output_ = out;
    have_cache_ = true;
    return out;
}

Tensor2D L2NormLayer::backward(const Tensor2D& grad_out) {
    if (!have_cache_) throw StateError("l2norm_backward before forward");
    if (!grad_out.same_shape(cached_output_))
        throw ArgumentError("l2norm_backward: grad shape " + grad_out.shape_str() + " vs " +
                            cached_output_.shape_str());
    Tensor2D out(grad_out.rows(), grad_out.cols());
    for (std::size_t i = 0; i < grad_out.rows(); ++i) {
        const double* g = grad_out.row(i);
        const double* fh = cached_output_.row(i);
        double* o = out.row(i);
        double g_dot_fh = dot({g, grad_out.cols()}, {fh, grad_out.cols()});
        double inv = 1.0 / cached_norms_[i];
        for (std::size_t j = 0; j < grad_out.cols(); ++j)
            o[j] = inv * (g[j] - g_dot_fh * fh[j]);
    }
    return out;
}

BatchNormNoScale::BatchNormNoScale(std::size_t k, double epsilon, double momentum)
    : running_mean(k, 0.0), running_var(k, 1.0), epsilon_(epsilon), momentum_(momentum) {
    if (k == 0) throw ArgumentError("BatchNormNoScale: zero dimension");
    if (epsilon <= 0.0) throw ArgumentError("BatchNormNoScale: epsilon must be > 0");
    if (momentum <= 0.0 || momentum >= 1.0)
        throw ArgumentError("BatchNormNoScale: momentum must be in (0, 1)");
}

Tensor2D BatchNormNoScale::forward(const Tensor2D& f) {
    const std::size_t k = dim();
    if (f.cols() != k)
        throw ArgumentError("bn_forward: input " + f.shape_str() + " vs dim " + std::to_string(k));
    const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
    Tensor2D out(f.rows(), k);

    if (mode_ == Mode::infer) {
        for (std::size_t j = 0; j < k; ++j) {
            double inv_std = 1.0 / std::sqrt(running_var[j] + epsilon_);
            for (std::size_t i = 0; i < f.rows(); ++i)
                out(i, j) = (f(i, j) - running_mean[j]) * inv_std * inv_sqrt_k;
        }
        return out;
    }

    const std::size_t n = f.rows();
    if (n < 2) throw ArgumentError("bn_forward: train mode needs batch size >= 2, got " +
                                   std::to_string(n));
    cached_xhat_ = Tensor2D(n, k);
    cached_inv_std_.resize(k);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < k; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += f(i, j);
        mean *= inv_n;
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = f(i, j) - mean;
            var += d * d;
        }
        var *= inv_n;  // biased
        double inv_std = 1.0 / std::sqrt(var + epsilon_);
        cached_inv_std_[j] = inv_std;
        for (std::size_t i = 0; i < n; ++i) {
            double xh = (f(i, j) - mean) * inv_std;
            cached_xhat_(i, j) = xh;
            out(i, j) = xh * inv_sqrt_k;
        }
        running_mean[j] = momentum_ * running_mean[j] + (1.0 - momentum_) * mean;
        running_var[j] = momentum_ * running_var[j] + (1.0 - momentum_) * var;
    }
    have_train_cache_ = true;
    return out;
}

Tensor2D BatchNormNoScale::backward(const Tensor2D& grad_out) {
    if (mode_ == Mode::infer) throw StateError("bn_backward: not available in infer mode");
    if (!have_train_cache_) throw StateError("bn_backward before forward");
    if (!grad_out.same_shape(cached_xhat_))
        throw ArgumentError("bn_backward: grad shape " + grad_out.shape_str() + " vs " +
                            cached_xhat_.shape_str());
    const std::size_t n = grad_out.rows(), k = grad_out.cols();
    const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
    const double inv_n = 1.0 / static_cast<double>(n);
    Tensor2D out(n, k);
    // Per dimension, with ghat = grad_out / sqrt(k) and xhat the cached
    // standardized values:
    //   dx_i = inv_std * (ghat_i - mean(ghat) - xhat_i * mean(ghat * xhat))
    for (std::size_t j = 0; j < k; ++j) {
        double mean_g = 0.0, mean_gx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double gh = grad_out(i, j) * inv_sqrt_k;
            mean_g += gh;
            mean_gx += gh * cached_xhat_(i, j);
        }
        mean_g *= inv_n;
        mean_gx *= inv_n;
        for (std::size_t i = 0; i < n; ++i) {
            double gh = grad_out(i, j) * inv_sqrt_k;
            out(i, j) = cached_inv_std_[j] * (gh - mean_g - cached_xhat_(i, j) * mean_gx);
        }
    }
    return out;
}

}  // namespace heatup
