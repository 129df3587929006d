#pragma once

#include <array>
#include <span>
#include <vector>

#include "epinet/lf/lightfield.hpp"
#include "epinet/model/config.hpp"
#include "epinet/nn/tensor.hpp"

namespace epinet::model {

/// One training unit: co-located grayscale windows of the four directional
/// stacks (one raster per direction, one channel per view) and the ground
/// truth disparity at the window center.
struct Sample {
    std::array<lf::Image, 4> stacks;  // indexed by lf::Direction
    float target = 0.0f;
    bool valid = true;
    int center_y = -1;  // window center in the source view
    int center_x = -1;

    const lf::Image& stack(lf::Direction d) const { return stacks[static_cast<int>(d)]; }
};

/// Crops a window of every stack. (y0, x0) is the window's top-left corner.
Sample crop_sample(const lf::StackSet& stacks, int y0, int x0, int size, float target);

/// Stream input tensors for a batch, in cfg.stream_directions() order.
std::vector<nn::Tensor<float>> batch_inputs(std::span<const Sample> samples, std::span<const std::size_t> indices,
                                            const EpinetConfig& cfg);

/// Stream input tensors (batch 1) for whole stacks, optionally restricted to a window.
std::vector<nn::Tensor<float>> stack_inputs(const lf::StackSet& stacks, const EpinetConfig& cfg, int y0, int x0,
                                            int height, int width);

}  // namespace epinet::model
