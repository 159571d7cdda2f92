#include "heatup/model.hpp"

#include <cmath>

#include "heatup/errors.hpp"

namespace heatup {

std::string to_string(EmbedNorm m) {
    switch (m) {
        case EmbedNorm::none: return "none";
        case EmbedNorm::l2: return "l2";
        case EmbedNorm::batchnorm: return "batchnorm";
    }
    return "?";
}

std::string to_string(WeightNorm m) {
    return m == WeightNorm::off ? "off" : "l2";
}

EmbedNorm embed_norm_from_string(const std::string& s) {
    if (s == "none") return EmbedNorm::none;
    if (s == "l2") return EmbedNorm::l2;
    if (s == "batchnorm") return EmbedNorm::batchnorm;
    throw ArgumentError("unknown embedding norm '" + s + "' (none, l2, batchnorm)");
}

WeightNorm weight_norm_from_string(const std::string& s) {
    if (s == "off") return WeightNorm::off;
    if (s == "l2") return WeightNorm::l2;
    throw ArgumentError("unknown weight norm '" + s + "' (off, l2)");
}

void ArchDescriptor::validate() const {
    if (input_dim == 0) throw ArgumentError("arch: input_dim must be > 0");
    if (embedding_dim == 0) throw ArgumentError("arch: embedding_dim must be > 0");
    if (num_classes == 0) throw ArgumentError("arch: num_classes must be > 0");
    for (std::size_t w : hidden)
        if (w == 0) throw ArgumentError("arch: zero-width hidden layer");
}

EmbeddingNet::EmbeddingNet(const ArchDescriptor& arch)
    : norm_mode(arch.embed_norm),
      l2norm(arch.l2_epsilon),
      bn(arch.embedding_dim, arch.bn_epsilon, arch.bn_momentum) {
    arch.validate();
    std::size_t in = arch.input_dim;
    for (std::size_t w : arch.hidden) {
        layers.emplace_back(in, w, /*with_bias=*/true);
        relus.emplace_back();
        in = w;
    }
    layers.emplace_back(in, arch.embedding_dim, /*with_bias=*/true);
}

Tensor2D EmbeddingNet::forward_train(const Tensor2D& x, Tensor2D* f_out) {
    Tensor2D h = x;
    for (std::size_t i = 0; i < relus.size(); ++i) h = relus[i].forward(layers[i].forward(h));
    Tensor2D f = layers.back().forward(h);
    if (f_out) *f_out = f;
    switch (norm_mode) {
        case EmbedNorm::none: return f;
        case EmbedNorm::l2: return l2norm.forward(f);
        case EmbedNorm::batchnorm:
            bn.set_mode(BatchNormNoScale::Mode::train);
            return bn.forward(f);
    }
    return f;
}

Tensor2D EmbeddingNet::forward_infer(const Tensor2D& x, Tensor2D* f_out) const {
    Tensor2D h = x;
    for (std::size_t i = 0; i < relus.size(); ++i) h = relus[i].infer(layers[i].infer(h));
    Tensor2D f = layers.back().infer(h);
    if (f_out) *f_out = f;
    switch (norm_mode) {
        case EmbedNorm::none: return f;
        case EmbedNorm::l2: return l2norm.infer(f);
        case EmbedNorm::batchnorm: {
            BatchNormNoScale frozen = bn;
            frozen.set_mode(BatchNormNoScale::Mode::infer);
            return frozen.forward(f);
        }
    }
    return f;
}

Tensor2D EmbeddingNet::backward(const Tensor2D& grad_f_hat) {
    Tensor2D g = grad_f_hat;
    switch (norm_mode) {
        case EmbedNorm::none: break;
        case EmbedNorm::l2: g = l2norm.backward(g); break;
        case EmbedNorm::batchnorm: g = bn.backward(g); break;
    }
    g = layers.back().backward(g);
    for (std::size_t i = relus.size(); i-- > 0;) g = layers[i].backward(relus[i].backward(g));
    return g;
}

void EmbeddingNet::zero_grad() {
    for (auto& l : layers) l.zero_grad();
}

std::vector<ParamView> collect_params(EmbeddingNet& net, ClassifierHead& head) {
    std::vector<ParamView> out;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        auto& l = net.layers[i];
        std::string base = "net.linear" + std::to_string(i);
        out.push_back({base + ".weight", l.weight.data(), l.grad_weight.data(), l.weight.size()});
        if (l.has_bias())
            out.push_back({base + ".bias", l.bias.data(), l.grad_bias.data(), l.bias.size()});
    }
    out.push_back({"head.weight", head.weight.data(), head.grad_weight.data(), head.weight.size()});
    if (head.has_bias())
        out.push_back({"head.bias", head.bias.data(), head.grad_bias.data(), head.bias.size()});
    return out;
}

namespace {

void glorot_fill(Tensor2D& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    double* d = w.data();
    for (std::size_t i = 0; i < w.size(); ++i) d[i] = rng.uniform(-limit, limit);
}

}  // namespace

void init_params(EmbeddingNet& net, ClassifierHead& head, Rng& rng) {
    for (auto& l : net.layers) {
        glorot_fill(l.weight, l.in_dim(), l.out_dim(), rng);
        l.bias.assign(l.bias.size(), 0.0);
    }
    glorot_fill(head.weight, head.embed_dim(), head.num_classes(), rng);
    head.bias.assign(head.bias.size(), 0.0);
}

void SgdMomentum::step(const std::vector<ParamView>& params) {
    if (velocity.empty()) {
        velocity.reserve(params.size());
        for (const auto& p : params) velocity.emplace_back(p.count, 0.0);
    }
    if (velocity.size() != params.size())
        throw ArgumentError("SgdMomentum: parameter count changed under the optimizer");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& p = params[i];
        auto& v = velocity[i];
        if (v.size() != p.count)
            throw ArgumentError("SgdMomentum: velocity shape mismatch for " + p.name);
        for (std::size_t j = 0; j < p.count; ++j) {
            v[j] = momentum * v[j] - lr * p.grad[j];
            p.value[j] += v[j];
        }
    }
}

void SgdMomentum::reset_velocity() {
    for (auto& v : velocity) v.assign(v.size(), 0.0);
}

ForwardResult forward(EmbeddingNet& net, ClassifierHead& head, const SampleBatch& batch,
                      Mode mode) {
    if (batch.dim() != net.input_dim())
        throw ArgumentError("forward: batch dim " + std::to_string(batch.dim()) +
                            " vs net input " + std::to_string(net.input_dim()));
    ForwardResult r;
    if (mode == Mode::train) {
        r.f_hat = net.forward_train(batch.x, &r.f);
        r.logits = head.logits(r.f_hat);
    } else {
        r.f_hat = net.forward_infer(batch.x, &r.f);
        r.logits = head.logits_infer(r.f_hat);
    }
    return r;
}

double train_step(EmbeddingNet& net, ClassifierHead& head, const SampleBatch& batch,
                  SgdMomentum& opt, double alpha, std::size_t* correct_out) {
    ForwardResult r = forward(net, head, batch, Mode::train);
    double loss = ce_loss(r.logits, batch.labels, alpha);
    if (correct_out) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < r.logits.rows(); ++i) {
            const double* z = r.logits.row(i);
            double zy = z[batch.labels[i]];
            bool ok = true;
            for (std::size_t m = 0; m < r.logits.cols(); ++m)
                if (static_cast<int>(m) != batch.labels[i] && z[m] >= zy) {
                    ok = false;
                    break;
                }
            if (ok) ++correct;
        }
        *correct_out = correct;
    }
    net.zero_grad();
    head.zero_grad();
    Tensor2D gz = grad_logits(r.logits, batch.labels, alpha);
    Tensor2D gf_hat = head.grad_embedding(gz);
    net.backward(gf_hat);
    opt.step(collect_params(net, head));
    return loss;
}

}  // namespace heatup
