#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "epinet/model/network.hpp"
#include "epinet/model/sample.hpp"
#include "epinet/nn/rmsprop.hpp"

namespace epinet::model {

struct TrainOptions {
    int iterations = 5000;
    int batch = 16;
    double lr = 1e-5;
    double lr_final = 1e-6;
    /// Fraction of iterations after which lr_final applies.
    double decay_at = 0.8;
    int log_every = 100;
    std::uint64_t seed = 1;
};

struct LossPoint {
    int iteration = 0;
    /// Mean batch loss over the iterations since the previous point.
    double loss = 0.0;
};

struct TrainResult {
    std::vector<LossPoint> curve;
    double final_loss = 0.0;
};

/// Learning rate at a 0-based iteration.
double learning_rate(const TrainOptions& opts, int iteration);

using TrainCallback = std::function<void(const LossPoint&)>;

/// MAE + RMSprop training on valid samples. Each batch draws `batch` indices
/// uniformly with replacement from a generator seeded by `opts.seed`.
/// Throws DataError when no valid samples remain.
TrainResult train(Epinet& net, std::span<const Sample> samples, const TrainOptions& opts,
                  const TrainCallback& on_log = {});

/// One optimization step on a fixed batch; returns the batch loss before the update.
double train_step(Epinet& net, nn::Rmsprop<float>& opt, std::span<const Sample> samples,
                  std::span<const std::size_t> indices, double lr);

}  // namespace epinet::model
