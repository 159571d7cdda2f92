#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "heatup/batch.hpp"
#include "heatup/layers.hpp"
#include "heatup/loss_head.hpp"
#include "heatup/rng.hpp"

namespace heatup {

enum class EmbedNorm { none, l2, batchnorm };

std::string to_string(EmbedNorm m);
std::string to_string(WeightNorm m);
EmbedNorm embed_norm_from_string(const std::string& s);
WeightNorm weight_norm_from_string(const std::string& s);

// Everything needed to rebuild a network + head, and nothing else.
struct ArchDescriptor {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden;  // ReLU after each hidden linear
    std::size_t embedding_dim = 0;    // k
    std::size_t num_classes = 0;      // M
    EmbedNorm embed_norm = EmbedNorm::l2;
    WeightNorm weight_norm = WeightNorm::l2;
    double bn_epsilon = 1e-5;
    double bn_momentum = 0.9;
    double l2_epsilon = 1e-12;

    void validate() const;
};

// MLP embedding trunk: (Linear -> ReLU) per hidden width, then a final
// Linear of width k, then the configured embedding normalization.
class EmbeddingNet {
public:
    explicit EmbeddingNet(const ArchDescriptor& arch);

    // Train-mode pass; caches activations for backward. Returns f_hat and
    // stores the raw embedding in *f_out when given.
    Tensor2D forward_train(const Tensor2D& x, Tensor2D* f_out = nullptr);
    // Pure inference pass; batch-norm uses frozen running statistics.
    Tensor2D forward_infer(const Tensor2D& x, Tensor2D* f_out = nullptr) const;
    // Backward through normalization and the stack; accumulates parameter
    // gradients and returns the gradient with respect to the input.
    Tensor2D backward(const Tensor2D& grad_f_hat);
    void zero_grad();

    std::size_t input_dim() const { return layers.front().in_dim(); }
    std::size_t embedding_dim() const { return layers.back().out_dim(); }

    std::vector<LinearLayer> layers;
    std::vector<ReluLayer> relus;
    EmbedNorm norm_mode;
    L2NormLayer l2norm;
    BatchNormNoScale bn;
};

// One mutable parameter buffer with its gradient buffer.
struct ParamView {
    std::string name;
    double* value;
    double* grad;
    std::size_t count;
};

// Declaration order: net linears (weight then bias each), head weight,
// head bias when present. Checkpoints and optimizer state follow it.
std::vector<ParamView> collect_params(EmbeddingNet& net, ClassifierHead& head);

// Glorot-uniform init of every linear weight (biases zero), then the head.
// Deterministic given the generator state.
void init_params(EmbeddingNet& net, ClassifierHead& head, Rng& rng);

class SgdMomentum {
public:
    SgdMomentum(double lr, double momentum = 0.9) : lr(lr), momentum(momentum) {}

    // v <- momentum*v - lr*grad; theta <- theta + v. Allocates velocity
    // buffers on first use and checks alignment afterwards.
    void step(const std::vector<ParamView>& params);
    void reset_velocity();

    double lr;
    double momentum;
    std::vector<std::vector<double>> velocity;
};

enum class Mode { train, infer };

struct ForwardResult {
    Tensor2D f;       // raw embedding
    Tensor2D f_hat;   // normalized embedding (== f when norm is none)
    Tensor2D logits;  // f_hat * W_hat + b
};

ForwardResult forward(EmbeddingNet& net, ClassifierHead& head, const SampleBatch& batch,
                      Mode mode);

// One forward + full backward + momentum update. Returns the batch loss;
// when correct_out is given it receives the strict-margin correct count.
double train_step(EmbeddingNet& net, ClassifierHead& head, const SampleBatch& batch,
                  SgdMomentum& opt, double alpha, std::size_t* correct_out = nullptr);

}  // namespace heatup
