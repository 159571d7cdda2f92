#include "heatup/loss_head.hpp"

#include <cmath>
#include <string>

#include "heatup/errors.hpp"
#include "heatup/softmax.hpp"

namespace heatup {

namespace {

void check_labels(std::span<const int> labels, std::size_t batch, std::size_t num_classes) {
    if (labels.size() != batch)
        throw ArgumentError("labels length " + std::to_string(labels.size()) + " vs batch " +
                            std::to_string(batch));
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes)
            throw ArgumentError("label " + std::to_string(labels[i]) + " at row " +
                                std::to_string(i) + " out of range [0, " +
                                std::to_string(num_classes) + ")");
}

}  // namespace

ClassifierHead::ClassifierHead(std::size_t embed_dim, std::size_t num_classes, WeightNorm wn,
                               double a)
    : weight(embed_dim, num_classes),
      grad_weight(embed_dim, num_classes),
      weight_norm(wn),
      alpha(a) {
    if (embed_dim == 0 || num_classes == 0)
        throw ArgumentError("ClassifierHead: zero-sized head");
    if (a <= 0.0) throw ArgumentError("ClassifierHead: alpha must be > 0");
    if (wn == WeightNorm::off) {
        bias.assign(num_classes, 0.0);
        grad_bias.assign(num_classes, 0.0);
    }
}

Tensor2D ClassifierHead::normalized_weight() const {
    Tensor2D w_hat = weight;
    if (weight_norm == WeightNorm::l2) {
        for (std::size_t m = 0; m < w_hat.cols(); ++m) {
            double n2 = 0.0;
            for (std::size_t i = 0; i < w_hat.rows(); ++i) n2 += w_hat(i, m) * w_hat(i, m);
            double n = std::sqrt(n2);
            if (n <= 1e-12)
                throw DegenerateInputError("weight column " + std::to_string(m) + " has norm " +
                                           std::to_string(n));
            for (std::size_t i = 0; i < w_hat.rows(); ++i) w_hat(i, m) /= n;
        }
    }
    return w_hat;
}

Tensor2D ClassifierHead::logits_infer(const Tensor2D& f_hat) const {
    if (f_hat.cols() != embed_dim())
        throw ArgumentError("head logits: input " + f_hat.shape_str() + " vs weight " +
                            weight.shape_str());
    Tensor2D z = matmul(f_hat, normalized_weight());
    if (has_bias()) add_row_vector(z, bias);
    return z;
}

Tensor2D ClassifierHead::logits(const Tensor2D& f_hat) {
    if (f_hat.cols() != embed_dim())
        throw ArgumentError("head logits: input " + f_hat.shape_str() + " vs weight " +
                            weight.shape_str());
    cached_w_hat_ = normalized_weight();
    if (weight_norm == WeightNorm::l2) {
        cached_w_norms_.resize(weight.cols());
        for (std::size_t m = 0; m < weight.cols(); ++m) {
            double n2 = 0.0;
            for (std::size_t i = 0; i < weight.rows(); ++i) n2 += weight(i, m) * weight(i, m);
            cached_w_norms_[m] = std::sqrt(n2);
        }
    }
    cached_input_ = f_hat;
    have_cache_ = true;
    Tensor2D z = matmul(f_hat, cached_w_hat_);
    if (has_bias()) add_row_vector(z, bias);
    return z;
}

Tensor2D ClassifierHead::grad_embedding(const Tensor2D& grad_z) {
    if (!have_cache_) throw StateError("grad_embedding before logits");
    if (grad_z.rows() != cached_input_.rows() || grad_z.cols() != num_classes())
        throw ArgumentError("grad_embedding: grad " + grad_z.shape_str() + " vs logits " +
                            std::to_string(cached_input_.rows()) + "x" +
                            std::to_string(num_classes()));

    // Raw accumulation U = f_hat^T * grad_z, one column per class.
    Tensor2D u = matmul_at_b(cached_input_, grad_z);
    if (weight_norm == WeightNorm::l2) {
        // Through the column-normalization Jacobian:
        // dW_m = (U_m - (U_m . w_hat_m) w_hat_m) / ||w_m||.
        for (std::size_t m = 0; m < num_classes(); ++m) {
            double u_dot_wh = 0.0;
            for (std::size_t i = 0; i < embed_dim(); ++i) u_dot_wh += u(i, m) * cached_w_hat_(i, m);
            double inv = 1.0 / cached_w_norms_[m];
            for (std::size_t i = 0; i < embed_dim(); ++i)
                grad_weight(i, m) += inv * (u(i, m) - u_dot_wh * cached_w_hat_(i, m));
        }
    } else {
        axpy(1.0, u, grad_weight);
    }
    if (has_bias()) {
        std::vector<double> gb = col_sums(grad_z);
        for (std::size_t m = 0; m < gb.size(); ++m) grad_bias[m] += gb[m];
    }
    return matmul_a_bt(grad_z, cached_w_hat_);
}

void ClassifierHead::zero_grad() {
    grad_weight.fill(0.0);
    grad_bias.assign(grad_bias.size(), 0.0);
}

double ce_loss(const Tensor2D& logits, std::span<const int> labels, double alpha) {
    if (alpha <= 0.0) throw ArgumentError("ce_loss: alpha must be > 0");
    check_labels(labels, logits.rows(), logits.cols());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        std::vector<double> logp = log_softmax_temp(logits.row_span(i), alpha);
        total -= logp[static_cast<std::size_t>(labels[i])];
    }
    return total / static_cast<double>(logits.rows());
}

Tensor2D grad_logits(const Tensor2D& logits, std::span<const int> labels, double alpha) {
    if (alpha <= 0.0) throw ArgumentError("grad_logits: alpha must be > 0");
    check_labels(labels, logits.rows(), logits.cols());
    const double inv_batch = 1.0 / static_cast<double>(logits.rows());
    Tensor2D out(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        std::vector<double> p = softmax_temp(logits.row_span(i), alpha);
        double* o = out.row(i);
        for (std::size_t m = 0; m < logits.cols(); ++m) o[m] = alpha * p[m] * inv_batch;
        o[static_cast<std::size_t>(labels[i])] -= alpha * inv_batch;
    }
    return out;
}

double gradient_magnitude(const ClassifierHead& head, std::span<const double> f_hat_row,
                          int label, double alpha) {
    if (f_hat_row.size() != head.embed_dim())
        throw ArgumentError("gradient_magnitude: row size " + std::to_string(f_hat_row.size()) +
                            " vs embed dim " + std::to_string(head.embed_dim()));
    if (label < 0 || static_cast<std::size_t>(label) >= head.num_classes())
        throw ArgumentError("gradient_magnitude: label out of range");
    Tensor2D w_hat = head.normalized_weight();
    std::vector<double> z(head.num_classes(), 0.0);
    for (std::size_t m = 0; m < head.num_classes(); ++m) {
        double s = 0.0;
        for (std::size_t i = 0; i < head.embed_dim(); ++i) s += f_hat_row[i] * w_hat(i, m);
        z[m] = s + (head.has_bias() ? head.bias[m] : 0.0);
    }
    std::vector<double> p = softmax_temp(z, alpha);
    p[static_cast<std::size_t>(label)] -= 1.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < head.embed_dim(); ++i) {
        double g = 0.0;
        for (std::size_t m = 0; m < head.num_classes(); ++m) g += p[m] * w_hat(i, m);
        g *= alpha;
        norm2 += g * g;
    }
    return std::sqrt(norm2);
}

}  // namespace heatup
