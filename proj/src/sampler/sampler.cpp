#include "epinet/sampler/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace epinet::sampler {

lf::Mask textureless_mask(const lf::Image& gray, int patch, float threshold) {
    if (gray.channels() != 1) throw ShapeError("textureless mask expects a grayscale image");
    const int r = patch / 2;
    const int h = gray.height(), w = gray.width();
    lf::Mask out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const float c = gray.at(y, x);
            double sum = 0.0;
            int n = 0;
            for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy) {
                for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
                    sum += std::abs(gray.at(yy, xx) - c);
                    ++n;
                }
            }
            out.at(y, x) = (sum / n) < threshold ? 1 : 0;
        }
    }
    return out;
}

lf::Mask eligible_centers(const lf::Mask& rejected, int patch) {
    const int h = rejected.height(), w = rejected.width();
    const int r = patch / 2;
    // Summed-area table of rejected pixels.
    std::vector<int> sat(static_cast<std::size_t>(h + 1) * (w + 1), 0);
    auto at = [&](int y, int x) -> int& { return sat[static_cast<std::size_t>(y) * (w + 1) + x]; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            at(y + 1, x + 1) = (rejected.at(y, x) ? 1 : 0) + at(y, x + 1) + at(y + 1, x) - at(y, x);
    lf::Mask out(h, w);
    for (int y = r; y + r < h; ++y) {
        for (int x = r; x + r < w; ++x) {
            const int y0 = y - r, x0 = x - r, y1 = y + r + 1, x1 = x + r + 1;
            const int hits = at(y1, x1) - at(y0, x1) - at(y1, x0) + at(y0, x0);
            out.at(y, x) = hits == 0 ? 1 : 0;
        }
    }
    return out;
}

std::vector<model::Sample> sample_patches(const lf::LightField& lf, const lf::DisparityMap& gt,
                                          const lf::Mask* exclusion, int count, std::uint64_t seed, int patch) {
    if (gt.height() != lf.height() || gt.width() != lf.width()) {
        throw ShapeError("ground truth does not match the light field");
    }
    if (exclusion && (exclusion->height() != lf.height() || exclusion->width() != lf.width())) {
        throw ShapeError("exclusion mask does not match the light field");
    }
    const lf::StackSet stacks = lf::extract_stacks(lf);
    const lf::Image& center = stacks[lf::Direction::Horizontal].views[lf.angular_extent()];
    lf::Mask rejected = textureless_mask(center, patch);
    if (exclusion) {
        for (std::size_t i = 0; i < rejected.size(); ++i)
            if (exclusion->data()[i]) rejected.data()[i] = 1;
    }
    const lf::Mask eligible = eligible_centers(rejected, patch);
    std::vector<std::pair<int, int>> centers;
    for (int y = 0; y < eligible.height(); ++y)
        for (int x = 0; x < eligible.width(); ++x)
            if (eligible.at(y, x)) centers.emplace_back(y, x);
    if (centers.empty()) throw DataError("no eligible patch centers after masking");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
    const int r = patch / 2;
    std::vector<model::Sample> out;
    out.reserve(static_cast<std::size_t>(std::max(0, count)));
    for (int i = 0; i < count; ++i) {
        const auto [y, x] = centers[pick(rng)];
        out.push_back(model::crop_sample(stacks, y - r, x - r, patch, gt.at(y, x)));
    }
    return out;
}

std::vector<model::Sample> sample_scenes(std::span<const LabeledScene> scenes, int count, std::uint64_t seed,
                                         int patch) {
    if (scenes.empty()) throw DataError("no training scenes");
    std::vector<model::Sample> out;
    const int n = static_cast<int>(scenes.size());
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::vector<std::uint64_t> seeds(scenes.size());
    seq.generate(seeds.begin(), seeds.end());
    for (int i = 0; i < n; ++i) {
        const int share = count / n + (i < count % n ? 1 : 0);
        const auto& s = scenes[i];
        auto part = sample_patches(s.lightfield, s.disparity, s.exclusion ? &*s.exclusion : nullptr, share,
                                   seeds[i], patch);
        for (auto& p : part) out.push_back(std::move(p));
    }
    return out;
}

}  // namespace epinet::sampler
