#pragma once

#include <array>

#include "epinet/lf/raster.hpp"

namespace epinet::eval {

inline constexpr std::array<float, 3> kBadPixThresholds = {0.01f, 0.03f, 0.07f};

/// Percentage of evaluated pixels with |pred - gt| > threshold.
/// A null mask evaluates every pixel; an all-zero mask is an error.
double badpix(const lf::DisparityMap& pred, const lf::DisparityMap& gt, float threshold,
              const lf::Mask* eval_mask = nullptr);

/// 100 * mean squared error over evaluated pixels.
double mse100(const lf::DisparityMap& pred, const lf::DisparityMap& gt, const lf::Mask* eval_mask = nullptr);

/// Mean absolute error over evaluated pixels.
double mae(const lf::DisparityMap& pred, const lf::DisparityMap& gt, const lf::Mask* eval_mask = nullptr);

/// Evaluation mask that drops a border of `border` px on every side.
lf::Mask interior_mask(int height, int width, int border);

struct MetricRow {
    double badpix001 = 0, badpix003 = 0, badpix007 = 0, mse100 = 0;
};
MetricRow evaluate(const lf::DisparityMap& pred, const lf::DisparityMap& gt, const lf::Mask* eval_mask = nullptr);

/// Error visualization: white where |pred - gt| = 0, black at >= max_error.
lf::Image error_map(const lf::DisparityMap& pred, const lf::DisparityMap& gt, float max_error = 0.07f);

}  // namespace epinet::eval
