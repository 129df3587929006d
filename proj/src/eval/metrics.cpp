#include "epinet/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace epinet::eval {
namespace {

void check_aligned(const lf::DisparityMap& pred, const lf::DisparityMap& gt, const lf::Mask* mask) {
    if (pred.height() != gt.height() || pred.width() != gt.width()) {
        throw ShapeError("prediction and ground truth differ in size");
    }
    if (mask && (mask->height() != gt.height() || mask->width() != gt.width())) {
        throw ShapeError("evaluation mask differs in size");
    }
}

template <typename F>
std::size_t for_each_evaluated(const lf::DisparityMap& pred, const lf::DisparityMap& gt, const lf::Mask* mask,
                               F&& f) {
    check_aligned(pred, gt, mask);
    std::size_t n = 0;
    const auto& p = pred.data();
    const auto& g = gt.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (mask && !mask->data()[i]) continue;
        ++n;
        f(static_cast<double>(p[i]) - static_cast<double>(g[i]));
    }
    if (n == 0) throw DataError("evaluation mask is empty");
    return n;
}

}  // namespace

double badpix(const lf::DisparityMap& pred, const lf::DisparityMap& gt, float threshold, const lf::Mask* mask) {
    std::size_t bad = 0;
    const std::size_t n = for_each_evaluated(pred, gt, mask, [&](double e) {
        if (std::abs(e) > threshold) ++bad;
    });
    return 100.0 * static_cast<double>(bad) / static_cast<double>(n);
}

double mse100(const lf::DisparityMap& pred, const lf::DisparityMap& gt, const lf::Mask* mask) {
    double sum = 0.0;
    const std::size_t n = for_each_evaluated(pred, gt, mask, [&](double e) { sum += e * e; });
    return 100.0 * sum / static_cast<double>(n);
}

double mae(const lf::DisparityMap& pred, const lf::DisparityMap& gt, const lf::Mask* mask) {
    double sum = 0.0;
    const std::size_t n = for_each_evaluated(pred, gt, mask, [&](double e) { sum += std::abs(e); });
    return sum / static_cast<double>(n);
}

lf::Mask interior_mask(int height, int width, int border) {
    lf::Mask m(height, width);
    for (int y = border; y < height - border; ++y)
        for (int x = border; x < width - border; ++x) m.at(y, x) = 1;
    return m;
}

MetricRow evaluate(const lf::DisparityMap& pred, const lf::DisparityMap& gt, const lf::Mask* mask) {
    return {badpix(pred, gt, kBadPixThresholds[0], mask), badpix(pred, gt, kBadPixThresholds[1], mask),
            badpix(pred, gt, kBadPixThresholds[2], mask), mse100(pred, gt, mask)};
}

lf::Image error_map(const lf::DisparityMap& pred, const lf::DisparityMap& gt, float max_error) {
    check_aligned(pred, gt, nullptr);
    lf::Image img(gt.height(), gt.width(), 1);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const float e = std::abs(pred.data()[i] - gt.data()[i]);
        img.data()[i] = 1.0f - std::min(e / max_error, 1.0f);
    }
    return img;
}

}  // namespace epinet::eval
