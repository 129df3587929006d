#include "epinet/eval/weighted_median.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace epinet::eval {

float weighted_median_of(std::span<const float> values, std::span<const float> weights) {
    if (values.empty() || values.size() != weights.size()) throw ShapeError("weighted median needs matching inputs");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    double total = 0.0;
    for (float w : weights) total += w;
    const double half = 0.5 * total;
    double cum = 0.0;
    for (std::size_t i : order) {
        cum += weights[i];
        if (cum >= half) return values[i];
    }
    return values[order.back()];
}

lf::DisparityMap weighted_median(const lf::DisparityMap& d, const lf::Image& guide, const WeightedMedianParams& p) {
    if (guide.height() != d.height() || guide.width() != d.width() || guide.channels() != 1) {
        throw ShapeError("guide must be a grayscale image of the disparity map's size");
    }
    const int h = d.height(), w = d.width(), r = p.radius;
    const double ig = 1.0 / (2.0 * p.sigma_guide * p.sigma_guide);
    const double is = 1.0 / (2.0 * p.sigma_spatial * p.sigma_spatial);
    lf::DisparityMap out(h, w);
    std::vector<float> vals, wts;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            vals.clear();
            wts.clear();
            const float gc = guide.at(y, x);
            for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy) {
                for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
                    const double dg = guide.at(yy, xx) - gc;
                    const double ds2 = static_cast<double>((yy - y) * (yy - y) + (xx - x) * (xx - x));
                    vals.push_back(d.at(yy, xx));
                    wts.push_back(static_cast<float>(std::exp(-dg * dg * ig - ds2 * is)));
                }
            }
            out.at(y, x) = weighted_median_of(vals, wts);
        }
    }
    return out;
}

}  // namespace epinet::eval
