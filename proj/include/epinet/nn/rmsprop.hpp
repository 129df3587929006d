#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "epinet/nn/tensor.hpp"

namespace epinet::nn {

/// RMSprop with the accumulator inside the square root:
///   acc <- decay * acc + (1 - decay) * g^2
///   p   <- p - lr * g / sqrt(acc + epsilon)
template <typename T>
class Rmsprop {
public:
    explicit Rmsprop(double decay = 0.9, double epsilon = 1e-8) : decay_(decay), epsilon_(epsilon) {}

    /// Accumulators are created lazily on the first step and bound to the
    /// parameter order of that call.
    void step(const std::vector<Parameter<T>*>& params, double learning_rate) {
        if (acc_.empty()) {
            acc_.reserve(params.size());
            for (const auto* p : params) acc_.emplace_back(p->value.size(), T{});
        }
        if (acc_.size() != params.size()) throw ShapeError("rmsprop parameter list changed between steps");
        const T decay = static_cast<T>(decay_);
        const T keep = static_cast<T>(1.0 - decay_);
        const T eps = static_cast<T>(epsilon_);
        const T lr = static_cast<T>(learning_rate);
        for (std::size_t k = 0; k < params.size(); ++k) {
            Parameter<T>& p = *params[k];
            std::vector<T>& acc = acc_[k];
            if (acc.size() != p.value.size() || p.grad.size() != p.value.size()) {
                throw ShapeError("rmsprop shape mismatch for " + p.name);
            }
            for (std::size_t i = 0; i < acc.size(); ++i) {
                const T g = p.grad[i];
                acc[i] = decay * acc[i] + keep * g * g;
                p.value[i] -= lr * g / std::sqrt(acc[i] + eps);
            }
        }
    }

    const std::vector<std::vector<T>>& accumulators() const { return acc_; }
    double decay() const { return decay_; }
    double epsilon() const { return epsilon_; }

private:
    double decay_;
    double epsilon_;
    std::vector<std::vector<T>> acc_;
};

}  // namespace epinet::nn
