#include "epinet/model/infer.hpp"

#include <algorithm>

#include "epinet/augment/augment.hpp"
#include "epinet/model/sample.hpp"

namespace epinet::model {
namespace {

lf::StackSet pad_stacks(const lf::StackSet& stacks, int pad) {
    lf::StackSet out = stacks;
    for (auto& s : out.stacks)
        for (auto& v : s.views) v = lf::pad_reflect(v, pad);
    return out;
}

}  // namespace

InferResult infer_full(Epinet& net, const lf::StackSet& stacks_in, Padding pad, int tile) {
    if (tile < 1) throw RangeError("tile size must be positive");
    const EpinetConfig& cfg = net.config();
    const int rf = cfg.receptive_field();
    const int half = rf / 2;
    const lf::StackSet padded = pad == Padding::Reflect ? pad_stacks(stacks_in, half) : lf::StackSet{};
    const lf::StackSet& stacks = pad == Padding::Reflect ? padded : stacks_in;
    const auto& first = stacks[lf::Direction::Horizontal].views;
    if (first.empty()) throw ShapeError("empty view stack");
    const int h = first.front().height(), w = first.front().width();
    if (h < rf || w < rf) {
        throw ShapeError("views of " + std::to_string(h) + "x" + std::to_string(w) + " are below the " +
                         std::to_string(rf) + " px receptive field");
    }
    const int oh = h - (rf - 1), ow = w - (rf - 1);
    InferResult out{lf::DisparityMap(oh, ow), pad == Padding::Crop ? half : 0};
    for (int ty = 0; ty < oh; ty += tile) {
        for (int tx = 0; tx < ow; tx += tile) {
            const int th = std::min(tile, oh - ty), tw = std::min(tile, ow - tx);
            const auto inputs = stack_inputs(stacks, cfg, ty, tx, th + rf - 1, tw + rf - 1);
            const nn::Tensor<float> y = net.forward(inputs, nn::Mode::Infer);
            for (int i = 0; i < th; ++i)
                for (int j = 0; j < tw; ++j) out.disparity.at(ty + i, tx + j) = y.at(0, 0, i, j);
        }
    }
    return out;
}

InferResult infer_full(Epinet& net, const lf::LightField& lf, Padding pad, int tile) {
    if (lf.angular_extent() != net.config().angular_extent) {
        throw ShapeError("light field angular extent " + std::to_string(lf.angular_extent()) +
                         " does not match the network's " + std::to_string(net.config().angular_extent));
    }
    return infer_full(net, lf::extract_stacks(lf), pad, tile);
}

float infer_patch(Epinet& net, const lf::StackSet& stacks, int y0, int x0) {
    const int rf = net.config().receptive_field();
    const auto inputs = stack_inputs(stacks, net.config(), y0, x0, rf, rf);
    return net.forward(inputs, nn::Mode::Infer).at(0, 0, 0, 0);
}

std::vector<Orientation> all_orientations() {
    std::vector<Orientation> out;
    for (int f = 0; f < 2; ++f)
        for (int q = 0; q < 4; ++q) out.push_back({q, f == 1});
    return out;
}

lf::DisparityMap undo_orientation(const lf::DisparityMap& d, const Orientation& o) {
    lf::DisparityMap out = lf::rotate90(d, (4 - o.quarter_turns % 4) % 4);
    if (o.flip) {
        out = lf::flip_x(out);
        for (float& x : out.data()) x = -x;
    }
    return out;
}

EnsembleResult infer_ensemble(Epinet& net, const lf::LightField& lf, const std::vector<Orientation>& variants,
                              Padding pad, int tile) {
    if (lf.height() != lf.width()) throw ShapeError("ensemble inference requires square views");
    if (variants.empty()) throw ConfigError("ensemble needs at least one orientation");
    const lf::DisparityMap none(lf.height(), lf.width());
    std::vector<lf::DisparityMap> maps;
    int border = 0;
    for (const Orientation& o : variants) {
        augment::LabeledField f{lf, none};
        if (o.flip) f = augment::flip_lf(f.lightfield, f.disparity);
        if (o.quarter_turns % 4 != 0) f = augment::rotate_lf(f.lightfield, f.disparity, 90 * (o.quarter_turns % 4));
        InferResult r = infer_full(net, f.lightfield, pad, tile);
        border = r.border;
        maps.push_back(undo_orientation(r.disparity, o));
    }
    const int h = maps.front().height(), w = maps.front().width();
    EnsembleResult out{lf::DisparityMap(h, w), lf::DisparityMap(h, w), border};
    const double k = static_cast<double>(maps.size());
    for (std::size_t i = 0; i < out.mean.data().size(); ++i) {
        double sum = 0.0;
        for (const auto& m : maps) sum += m.data()[i];
        const double mean = sum / k;
        double var = 0.0;
        for (const auto& m : maps) var += (m.data()[i] - mean) * (m.data()[i] - mean);
        out.mean.data()[i] = static_cast<float>(mean);
        out.variance.data()[i] = static_cast<float>(var / k);
    }
    return out;
}

}  // namespace epinet::model
