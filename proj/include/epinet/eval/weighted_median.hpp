#pragma once

#include <span>

#include "epinet/lf/raster.hpp"

namespace epinet::eval {

struct WeightedMedianParams {
    int radius = 5;
    float sigma_guide = 0.1f;
    float sigma_spatial = 3.0f;
};

/// Weighted median of (value, weight) pairs: the smallest value whose
/// cumulative weight reaches half the total. Ties resolve toward the
/// smaller value.
float weighted_median_of(std::span<const float> values, std::span<const float> weights);

/// Edge-aware median filter. Each output pixel is the weighted median of the
/// disparities in its (2r+1)^2 window (clipped at the border) with weights
/// exp(-dg^2 / 2 sigma_g^2) * exp(-ds^2 / 2 sigma_s^2), dg the guide
/// difference to the center and ds the spatial distance.
lf::DisparityMap weighted_median(const lf::DisparityMap& disparity, const lf::Image& guide,
                                 const WeightedMedianParams& params = {});

}  // namespace epinet::eval
