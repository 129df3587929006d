#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "epinet/model/config.hpp"
#include "epinet/nn/layers.hpp"

namespace epinet::model {

/// Conv-ReLU-Conv-BN-ReLU, or Conv-ReLU-Conv when built without normalization.
template <typename T>
class ConvBlock {
public:
    ConvBlock(int in, int mid, int out, bool normalized, const std::string& name, double momentum, double epsilon)
        : conv1_(in, mid, name + ".conv1"), conv2_(mid, out, name + ".conv2") {
        if (normalized) bn_.emplace(out, name + ".bn", momentum, epsilon);
    }

    nn::Tensor<T> forward(const nn::Tensor<T>& x, nn::Mode mode) {
        const bool train = mode == nn::Mode::Train;
        nn::Tensor<T> h = relu1_.forward(conv1_.forward(x, train));
        h = conv2_.forward(h, train);
        if (!bn_) return h;
        return relu2_.forward(bn_->forward(h, mode));
    }

    nn::Tensor<T> backward(const nn::Tensor<T>& gy, bool need_input_grad) {
        nn::Tensor<T> g = gy;
        if (bn_) g = bn_->backward(relu2_.backward(g));
        g = relu1_.backward(conv2_.backward(g, true));
        return conv1_.backward(g, need_input_grad);
    }

    void init(std::mt19937_64& rng) {
        conv1_.init_he_uniform(rng);
        conv2_.init_he_uniform(rng);
    }

    void collect(std::vector<nn::Parameter<T>*>& out) {
        out.push_back(&conv1_.weight);
        out.push_back(&conv1_.bias);
        out.push_back(&conv2_.weight);
        out.push_back(&conv2_.bias);
        if (bn_) {
            out.push_back(&bn_->gamma);
            out.push_back(&bn_->beta);
        }
    }

    nn::BatchNorm<T>* batch_norm() { return bn_ ? &*bn_ : nullptr; }
    nn::Conv2x2<T>& conv1() { return conv1_; }
    nn::Conv2x2<T>& conv2() { return conv2_; }

private:
    nn::Conv2x2<T> conv1_;
    nn::Relu<T> relu1_;
    nn::Conv2x2<T> conv2_;
    std::optional<nn::BatchNorm<T>> bn_;
    nn::Relu<T> relu2_;
};

/// Multi-stream fully convolutional disparity regressor.
///
/// Inputs are one tensor per stream (in EpinetConfig::stream_directions()
/// order), each (batch, views_per_stack, H, W). The output is
/// (batch, 1, H - 22, W - 22) for the default depth: one signed, unbounded
/// disparity per valid position.
template <typename T>
class EpinetNet {
public:
    explicit EpinetNet(EpinetConfig cfg) : cfg_(cfg) {
        cfg_.validate();
        const double mom = cfg_.bn_momentum, eps = cfg_.bn_epsilon;
        const int streams = cfg_.n_streams;
        streams_.resize(static_cast<std::size_t>(streams));
        const auto dirs = cfg_.stream_directions();
        for (int s = 0; s < streams; ++s) {
            const std::string prefix = "stream." + std::string(lf::to_string(dirs[s]));
            for (int b = 0; b < cfg_.stream_blocks; ++b) {
                const int in = b == 0 ? cfg_.views_per_stack() : cfg_.stream_width;
                streams_[s].emplace_back(in, cfg_.stream_width, cfg_.stream_width, true,
                                         prefix + ".block" + std::to_string(b), mom, eps);
            }
        }
        for (int b = 0; b + 1 < cfg_.merge_blocks; ++b) {
            merge_.emplace_back(cfg_.merge_width, cfg_.merge_width, cfg_.merge_width, true,
                                "merge.block" + std::to_string(b), mom, eps);
        }
        merge_.emplace_back(cfg_.merge_width, cfg_.merge_width, 1, false,
                            "merge.block" + std::to_string(cfg_.merge_blocks - 1), mom, eps);
    }

    const EpinetConfig& config() const { return cfg_; }

    void init(std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        for (auto& stream : streams_)
            for (auto& block : stream) block.init(rng);
        for (auto& block : merge_) block.init(rng);
    }

    nn::Tensor<T> forward(std::span<const nn::Tensor<T>> inputs, nn::Mode mode) {
        if (static_cast<int>(inputs.size()) != cfg_.n_streams) {
            throw ShapeError("expected " + std::to_string(cfg_.n_streams) + " stream inputs, got " +
                             std::to_string(inputs.size()));
        }
        const nn::Tensor<T>& first = inputs.front();
        if (first.height() < cfg_.receptive_field() || first.width() < cfg_.receptive_field()) {
            throw ShapeError("input spatial size below the receptive field");
        }
        std::vector<nn::Tensor<T>> features;
        features.reserve(inputs.size());
        for (std::size_t s = 0; s < inputs.size(); ++s) {
            const nn::Tensor<T>& x = inputs[s];
            if (x.channels() != cfg_.views_per_stack() || !x.same_shape(first)) {
                throw ShapeError("stream input " + std::to_string(s) + " has shape " + x.shape_string());
            }
            nn::Tensor<T> h = streams_[s].front().forward(x, mode);
            for (std::size_t b = 1; b < streams_[s].size(); ++b) h = streams_[s][b].forward(h, mode);
            features.push_back(std::move(h));
        }
        nn::Tensor<T> h = nn::concat_channels<T>(features);
        for (auto& block : merge_) h = block.forward(h, mode);
        return h;
    }

    /// Requires a preceding Train-mode forward. Sets every parameter's grad.
    void backward(const nn::Tensor<T>& grad_out) {
        nn::Tensor<T> g = grad_out;
        for (auto it = merge_.rbegin(); it != merge_.rend(); ++it) g = it->backward(g, true);
        const std::vector<int> counts(static_cast<std::size_t>(cfg_.n_streams), cfg_.stream_width);
        auto parts = nn::split_channels<T>(g, counts);
        for (std::size_t s = 0; s < streams_.size(); ++s) {
            nn::Tensor<T> gs = std::move(parts[s]);
            for (std::size_t b = streams_[s].size(); b-- > 0;) gs = streams_[s][b].backward(gs, b > 0);
        }
    }

    std::vector<nn::Parameter<T>*> parameters() {
        std::vector<nn::Parameter<T>*> out;
        for (auto& stream : streams_)
            for (auto& block : stream) block.collect(out);
        for (auto& block : merge_) block.collect(out);
        return out;
    }

    std::vector<nn::BatchNorm<T>*> batch_norms() {
        std::vector<nn::BatchNorm<T>*> out;
        for (auto& stream : streams_)
            for (auto& block : stream)
                if (auto* bn = block.batch_norm()) out.push_back(bn);
        for (auto& block : merge_)
            if (auto* bn = block.batch_norm()) out.push_back(bn);
        return out;
    }

    std::size_t parameter_count() {
        std::size_t n = 0;
        for (auto* p : parameters()) n += p->value.size();
        return n;
    }

    std::vector<std::vector<ConvBlock<T>>>& streams() { return streams_; }
    std::vector<ConvBlock<T>>& merge() { return merge_; }

private:
    EpinetConfig cfg_;
    std::vector<std::vector<ConvBlock<T>>> streams_;
    std::vector<ConvBlock<T>> merge_;
};

using Epinet = EpinetNet<float>;

}  // namespace epinet::model
