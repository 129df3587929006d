#include "epinet/model/train.hpp"

#include <random>

#include "epinet/nn/rmsprop.hpp"

namespace epinet::model {

double learning_rate(const TrainOptions& opts, int iteration) {
    const double switch_at = opts.decay_at * static_cast<double>(opts.iterations);
    return static_cast<double>(iteration) < switch_at ? opts.lr : opts.lr_final;
}

double train_step(Epinet& net, nn::Rmsprop<float>& opt, std::span<const Sample> samples,
                  std::span<const std::size_t> indices, double lr) {
    const auto inputs = batch_inputs(samples, indices, net.config());
    const nn::Tensor<float> pred = net.forward(inputs, nn::Mode::Train);
    nn::Tensor<float> target(pred.batch(), 1, pred.height(), pred.width());
    for (int b = 0; b < pred.batch(); ++b)
        for (int y = 0; y < pred.height(); ++y)
            for (int x = 0; x < pred.width(); ++x) target.at(b, 0, y, x) = samples[indices[b]].target;
    const nn::LossResult<float> loss = nn::mae_loss(pred, target);
    net.backward(loss.grad);
    opt.step(net.parameters(), lr);
    return loss.loss;
}

TrainResult train(Epinet& net, std::span<const Sample> samples, const TrainOptions& opts,
                  const TrainCallback& on_log) {
    if (opts.batch < 1) throw ConfigError("batch size must be positive");
    if (opts.log_every < 1) throw ConfigError("log interval must be positive");
    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].valid) valid.push_back(i);
    if (valid.empty()) throw DataError("no valid training samples");

    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
    nn::Rmsprop<float> opt;
    TrainResult result;
    std::vector<std::size_t> indices(static_cast<std::size_t>(opts.batch));
    double window = 0.0;
    int window_n = 0;
    for (int it = 0; it < opts.iterations; ++it) {
        for (auto& idx : indices) idx = valid[pick(rng)];
        const double loss = train_step(net, opt, samples, indices, learning_rate(opts, it));
        window += loss;
        ++window_n;
        result.final_loss = loss;
        if ((it + 1) % opts.log_every == 0 || it + 1 == opts.iterations) {
            LossPoint p{it + 1, window / window_n};
            result.curve.push_back(p);
            if (on_log) on_log(p);
            window = 0.0;
            window_n = 0;
        }
    }
    return result;
}

}  // namespace epinet::model
