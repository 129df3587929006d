#include <gtest/gtest.h>

#include <random>

#include "epinet/eval/metrics.hpp"
#include "epinet/eval/weighted_median.hpp"
#include "support/reference.hpp"

using namespace epinet;
using namespace epinet::eval;

namespace {

lf::DisparityMap random_map(int h, int w, std::mt19937_64& rng, float lo = -2.0f, float hi = 2.0f) {
    std::uniform_real_distribution<float> dist(lo, hi);
    lf::DisparityMap d(h, w);
    for (float& v : d.data()) v = dist(rng);
    return d;
}

}  // namespace

TEST(BadPix, IdenticalIsZero) {
    std::mt19937_64 rng(1);
    const lf::DisparityMap gt = random_map(8, 8, rng);
    for (float t : kBadPixThresholds) EXPECT_EQ(badpix(gt, gt, t), 0.0);
    EXPECT_EQ(mse100(gt, gt), 0.0);
}

TEST(BadPix, ConstantOffset) {
    std::mt19937_64 rng(2);
    const lf::DisparityMap gt = random_map(8, 8, rng, -0.5f, 0.5f);
    lf::DisparityMap pred = gt;
    for (float& v : pred.data()) v += 0.05f;
    EXPECT_EQ(badpix(pred, gt, 0.01f), 100.0);
    EXPECT_EQ(badpix(pred, gt, 0.03f), 100.0);
    EXPECT_EQ(badpix(pred, gt, 0.07f), 0.0);
}

TEST(Mse100, ConstantErrorTenthIsOne) {
    const lf::DisparityMap gt(4, 4, 0.0f), pred(4, 4, 0.1f);
    EXPECT_NEAR(mse100(pred, gt), 1.0, 1e-6);
}

TEST(Metrics, MatchBruteForceOnRandomCases) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const lf::DisparityMap gt = random_map(8, 8, rng);
        lf::DisparityMap pred = gt;
        std::normal_distribution<float> noise(0.0f, 0.05f);
        for (float& v : pred.data()) v += noise(rng);
        lf::Mask mask(8, 8);
        for (auto& m : mask.data()) m = rng() % 4 != 0;
        mask.at(0, 0) = 1;
        for (float t : kBadPixThresholds) {
            EXPECT_EQ(badpix(pred, gt, t, &mask), epinet::testing::badpix_loop(pred, gt, t, &mask));
            EXPECT_EQ(badpix(pred, gt, t), epinet::testing::badpix_loop(pred, gt, t, nullptr));
        }
        EXPECT_EQ(mse100(pred, gt, &mask), epinet::testing::mse100_loop(pred, gt, &mask));
    }
}

TEST(Metrics, MonotoneInThresholdAndNonNegative) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        const lf::DisparityMap gt = random_map(8, 8, rng), pred = random_map(8, 8, rng, -2.1f, 2.1f);
        const MetricRow r = evaluate(pred, gt);
        EXPECT_GE(r.badpix001, r.badpix003);
        EXPECT_GE(r.badpix003, r.badpix007);
        EXPECT_GE(r.mse100, 0.0);
    }
}

TEST(Metrics, EmptyMaskAndShapeErrors) {
    const lf::DisparityMap a(4, 4);
    const lf::Mask none(4, 4);
    EXPECT_THROW(badpix(a, a, 0.07f, &none), DataError);
    EXPECT_THROW(mse100(a, a, &none), DataError);
    EXPECT_THROW(badpix(a, lf::DisparityMap(4, 5), 0.07f), ShapeError);
}

TEST(Metrics, InteriorMaskDropsBorder) {
    const lf::Mask m = interior_mask(30, 30, 11);
    std::size_t n = 0;
    for (auto v : m.data()) n += v;
    EXPECT_EQ(n, 8u * 8u);
    EXPECT_EQ(m.at(11, 11), 1);
    EXPECT_EQ(m.at(10, 11), 0);
}

TEST(Metrics, MaeOnTwoValues) {
    lf::DisparityMap pred(1, 2), gt(1, 2);
    pred.data() = {1.0f, 3.0f};
    gt.data() = {0.0f, 1.0f};
    EXPECT_DOUBLE_EQ(mae(pred, gt), 1.5);
}

TEST(WeightedMedian, UniformWeightsGiveLowerMedian) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<float> dist(-3.0f, 3.0f);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + rng() % 121;
        std::vector<float> v(n), w(n, 1.0f);
        for (float& x : v) x = dist(rng);
        EXPECT_EQ(weighted_median_of(v, w), epinet::testing::lower_median(v));
    }
}

TEST(WeightedMedian, TiesResolveTowardSmaller) {
    const std::vector<float> v = {2.0f, 1.0f};
    const std::vector<float> w = {1.0f, 1.0f};
    EXPECT_EQ(weighted_median_of(v, w), 1.0f);
    const std::vector<float> heavy = {3.0f, 1.0f};
    EXPECT_EQ(weighted_median_of(v, heavy), 2.0f);
}

TEST(WeightedMedian, ConstantDisparityUnchanged) {
    const lf::DisparityMap d(12, 12, 0.75f);
    const lf::Image guide = epinet::testing::random_image(12, 12, 6);
    EXPECT_EQ(weighted_median(d, guide), d);
}

TEST(WeightedMedian, SinglePixelOutlierRemoved) {
    lf::DisparityMap d(15, 15, 1.0f);
    d.at(7, 7) = 3.0f;
    const lf::Image guide(15, 15, 1, 0.5f);
    const lf::DisparityMap out = weighted_median(d, guide);
    EXPECT_EQ(out.at(7, 7), 1.0f);
    EXPECT_EQ(out, lf::DisparityMap(15, 15, 1.0f));
}

TEST(WeightedMedian, OutputValuesComeFromTheWindow) {
    std::mt19937_64 rng(7);
    const lf::DisparityMap d = random_map(10, 10, rng);
    const lf::Image guide = epinet::testing::random_image(10, 10, 8);
    const WeightedMedianParams p{2, 0.1f, 3.0f};
    const lf::DisparityMap out = weighted_median(d, guide, p);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) {
            bool found = false;
            for (int yy = std::max(0, y - 2); yy <= std::min(9, y + 2); ++yy)
                for (int xx = std::max(0, x - 2); xx <= std::min(9, x + 2); ++xx) found |= d.at(yy, xx) == out.at(y, x);
            EXPECT_TRUE(found);
        }
}

TEST(WeightedMedian, GuideEdgeKeepsDisparityEdge) {
    lf::DisparityMap d(12, 12, 0.0f);
    lf::Image guide(12, 12, 1, 0.2f);
    for (int y = 0; y < 12; ++y)
        for (int x = 6; x < 12; ++x) {
            d.at(y, x) = 2.0f;
            guide.at(y, x) = 0.8f;
        }
    EXPECT_EQ(weighted_median(d, guide), d);
}

TEST(ErrorMap, WhiteWhereExact) {
    const lf::DisparityMap gt(2, 2, 1.0f);
    lf::DisparityMap pred = gt;
    pred.at(1, 1) = 2.0f;
    const lf::Image img = error_map(pred, gt);
    EXPECT_EQ(img.at(0, 0), 1.0f);
    EXPECT_EQ(img.at(1, 1), 0.0f);
}
