#include "epinet/model/sample.hpp"

#include <algorithm>
#include <string>

namespace epinet::model {

Sample crop_sample(const lf::StackSet& stacks, int y0, int x0, int size, float target) {
    Sample s;
    s.target = target;
    s.center_y = y0 + size / 2;
    s.center_x = x0 + size / 2;
    for (lf::Direction dir : lf::kAllDirections) {
        const auto& views = stacks[dir].views;
        lf::Image win(size, size, static_cast<int>(views.size()));
        for (std::size_t k = 0; k < views.size(); ++k) {
            const lf::Image& v = views[k];
            if (y0 < 0 || x0 < 0 || y0 + size > v.height() || x0 + size > v.width()) {
                throw RangeError("sample window leaves the image");
            }
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x) win.at(y, x, static_cast<int>(k)) = v.at(y0 + y, x0 + x);
        }
        s.stacks[static_cast<int>(dir)] = std::move(win);
    }
    return s;
}

std::vector<nn::Tensor<float>> batch_inputs(std::span<const Sample> samples, std::span<const std::size_t> indices,
                                            const EpinetConfig& cfg) {
    const int views = cfg.views_per_stack();
    const int size = cfg.patch;
    const int batch = static_cast<int>(indices.size());
    std::vector<nn::Tensor<float>> out;
    for (lf::Direction dir : cfg.stream_directions()) {
        nn::Tensor<float> t(batch, views, size, size);
        for (int b = 0; b < batch; ++b) {
            const lf::Image& win = samples[indices[b]].stack(dir);
            if (win.channels() != views || win.height() != size || win.width() != size) {
                throw ShapeError("sample stack shape does not match the network configuration");
            }
            for (int c = 0; c < views; ++c) {
                auto src = win.plane(c);
                std::copy(src.begin(), src.end(), &t.at(b, c, 0, 0));
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<nn::Tensor<float>> stack_inputs(const lf::StackSet& stacks, const EpinetConfig& cfg, int y0, int x0,
                                            int height, int width) {
    const int views = cfg.views_per_stack();
    std::vector<nn::Tensor<float>> out;
    for (lf::Direction dir : cfg.stream_directions()) {
        const auto& vs = stacks[dir].views;
        if (static_cast<int>(vs.size()) != views) {
            throw ShapeError("stack has " + std::to_string(vs.size()) + " views, network expects " +
                             std::to_string(views));
        }
        nn::Tensor<float> t(1, views, height, width);
        for (int c = 0; c < views; ++c) {
            const lf::Image& img = vs[c];
            if (y0 < 0 || x0 < 0 || y0 + height > img.height() || x0 + width > img.width()) {
                throw RangeError("stack window leaves the image");
            }
            for (int y = 0; y < height; ++y)
                std::copy_n(&img.at(y0 + y, x0), width, &t.at(0, c, y, 0));
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace epinet::model
