#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "epinet/lf/lightfield.hpp"
#include "epinet/model/sample.hpp"

namespace epinet::sampler {

inline constexpr float kTexturelessThreshold = 0.02f;

/// True (rejected) where the mean absolute difference between the center
/// pixel and the pixels of its patch x patch window is strictly below the
/// threshold. Windows are clipped at the image border.
lf::Mask textureless_mask(const lf::Image& gray_center, int patch = 23, float threshold = kTexturelessThreshold);

/// Centers whose full window lies inside the image and contains no pixel set
/// in `rejected`.
lf::Mask eligible_centers(const lf::Mask& rejected, int patch);

/// Uniformly samples `count` patch centers (with replacement) among eligible
/// centers. A center is eligible when its window is inside the image and
/// overlaps neither the exclusion mask (reflections, nonzero = excluded) nor
/// a textureless pixel. Deterministic for a given seed.
std::vector<model::Sample> sample_patches(const lf::LightField& lf, const lf::DisparityMap& gt,
                                          const lf::Mask* exclusion, int count, std::uint64_t seed,
                                          int patch = 23);

struct LabeledScene {
    lf::LightField lightfield;
    lf::DisparityMap disparity;
    std::optional<lf::Mask> exclusion;
};

/// Splits `count` as evenly as possible over the scenes (earlier scenes take
/// the remainder) and samples each with its own seed derived from `seed`.
std::vector<model::Sample> sample_scenes(std::span<const LabeledScene> scenes, int count, std::uint64_t seed,
                                         int patch = 23);

}  // namespace epinet::sampler
