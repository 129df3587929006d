#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "epinet/lf/lightfield.hpp"
#include "epinet/synth/scene.hpp"
#include "support/reference.hpp"

using namespace epinet;
using namespace epinet::lf;

namespace {

LightField constant_disparity_field(float d, int n, int size, Interp interp, std::uint64_t seed) {
    const Image center = epinet::testing::random_image(size, size, seed);
    const DisparityMap disp(size, size, d);
    LightField field(n, size, size, 1);
    for (int v = -n; v <= n; ++v)
        for (int u = -n; u <= n; ++u) field.set_view(u, v, warp_center(center, disp, u, v, interp));
    return field;
}

}  // namespace

TEST(ExtractView, CenterViewIsTheMiddleSlot) {
    const LightField field = epinet::testing::labeled_grid(3, 4, 5);
    EXPECT_FLOAT_EQ(extract_view(field, 0, 0).at(0, 0), 0.5f);
    EXPECT_FLOAT_EQ(extract_view(field, 2, -1).at(3, 4), (20.0f - 1.0f + 50.0f) / 100.0f);
}

TEST(ExtractView, ZeroDisparityViewsAreIdentical) {
    const LightField field = constant_disparity_field(0.0f, 2, 12, Interp::Bilinear, 3);
    for (int v = -2; v <= 2; ++v)
        for (int u = -2; u <= 2; ++u) EXPECT_EQ(extract_view(field, u, v), extract_view(field, 0, 0));
}

TEST(ExtractView, OutsideGridThrows) {
    const LightField field = epinet::testing::labeled_grid(3, 4, 4);
    EXPECT_THROW(extract_view(field, 4, 0), AngularIndexError);
    EXPECT_THROW(extract_view(field, 0, -4), AngularIndexError);
}

TEST(ExtractStacks, SevenViewsPerStackForExtentThree) {
    const StackSet stacks = extract_stacks(epinet::testing::labeled_grid(3, 4, 4));
    for (Direction d : kAllDirections) EXPECT_EQ(stacks[d].views.size(), 7u);
}

TEST(ExtractStacks, NineViewStacksUse33DistinctViews) {
    const LightField field = epinet::testing::labeled_grid(4, 2, 2);
    const StackSet stacks = extract_stacks(field);
    std::set<float> labels;
    for (Direction d : kAllDirections) {
        ASSERT_EQ(stacks[d].views.size(), 9u);
        for (const Image& img : stacks[d].views) labels.insert(img.at(0, 0));
    }
    EXPECT_EQ(labels.size(), 33u);
}

TEST(ExtractStacks, OrderFollowsTheUnitStep) {
    const LightField field = epinet::testing::labeled_grid(3, 2, 2);
    const StackSet stacks = extract_stacks(field);
    for (Direction d : kAllDirections) {
        const auto [su, sv] = angular_step(d);
        for (int t = -3; t <= 3; ++t) {
            EXPECT_EQ(stacks[d].views[t + 3], field.view(t * su, t * sv)) << to_string(d) << " t=" << t;
        }
    }
}

TEST(ExtractStacks, ZeroDisparityStacksAreIdentical) {
    const StackSet stacks = extract_stacks(constant_disparity_field(0.0f, 3, 10, Interp::Nearest, 4));
    for (Direction d : kAllDirections)
        for (const Image& img : stacks[d].views) EXPECT_EQ(img, stacks[Direction::Horizontal].views[3]);
}

TEST(ToGray, IdempotentOnSingleChannel) {
    const Image img = epinet::testing::random_image(5, 6, 9);
    EXPECT_EQ(to_gray(img), img);
    EXPECT_EQ(to_gray(to_gray(img)), img);
}

TEST(ToGray, Itu601Weights) {
    Image rgb(1, 1, 3);
    rgb.at(0, 0, 0) = 1.0f;
    EXPECT_NEAR(to_gray(rgb).at(0, 0), 0.299f, 1e-6f);
    rgb.at(0, 0, 0) = 0.0f;
    rgb.at(0, 0, 1) = 1.0f;
    EXPECT_NEAR(to_gray(rgb).at(0, 0), 0.587f, 1e-6f);
}

TEST(WarpCenter, ZeroDisparityIsExactIdentity) {
    const Image img = epinet::testing::random_image(9, 11, 5);
    const DisparityMap zero(9, 11, 0.0f);
    for (Interp interp : {Interp::Nearest, Interp::Bilinear}) EXPECT_EQ(warp_center(img, zero, 2, -3, interp), img);
}

TEST(WarpCenter, UnitDisparityTranslatesTwoPixels) {
    const Image img = epinet::testing::random_image(8, 12, 6);
    const Image out = warp_center(img, DisparityMap(8, 12, 1.0f), 2, 0, Interp::Nearest);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 12; ++x) EXPECT_EQ(out.at(y, x), img.at(y, std::max(0, x - 2)));
}

TEST(WarpCenter, HalfPixelBilinearOnRampIsTheAverage) {
    Image ramp(4, 10);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 10; ++x) ramp.at(y, x) = 0.05f * x + 0.01f * y;
    const Image out = warp_center(ramp, DisparityMap(4, 10, 0.5f), 1, 0, Interp::Bilinear);
    for (int y = 0; y < 4; ++y)
        for (int x = 1; x < 10; ++x)
            EXPECT_NEAR(out.at(y, x), 0.5f * (ramp.at(y, x) + ramp.at(y, x - 1)), 1e-6f);
}

TEST(WarpCenter, NonFiniteDisparityThrows) {
    DisparityMap d(3, 3, 0.0f);
    d.at(1, 1) = std::nanf("");
    EXPECT_THROW(warp_center(Image(3, 3), d, 1, 0, Interp::Nearest), DataError);
}

TEST(WarpCenter, ShapeMismatchThrows) {
    EXPECT_THROW(warp_center(Image(3, 3), DisparityMap(3, 4), 1, 0, Interp::Nearest), ShapeError);
}

TEST(ExtractEpi, UnitDisparityTracesSlopeOne) {
    const LightField field = constant_disparity_field(1.0f, 3, 24, Interp::Nearest, 7);
    const Image epi = extract_epi(field, Direction::Horizontal, 10);
    ASSERT_EQ(epi.height(), 7);
    ASSERT_EQ(epi.width(), 24);
    // Least-squares slope of the x position of one center pixel across rows.
    const float target = field.view(0, 0).at(10, 12);
    double sxt = 0, stt = 0;
    for (int t = -3; t <= 3; ++t) {
        int found = -1;
        for (int x = 0; x < 24; ++x)
            if (epi.at(t + 3, x) == target) found = x;
        ASSERT_GE(found, 0);
        sxt += static_cast<double>(found - 12) * t;
        stt += static_cast<double>(t) * t;
    }
    EXPECT_DOUBLE_EQ(sxt / stt, 1.0);
}

TEST(ExtractEpi, ZeroDisparityRowsAreIdentical) {
    const LightField field = constant_disparity_field(0.0f, 2, 9, Interp::Nearest, 8);
    for (Direction d : kAllDirections) {
        const Image epi = extract_epi(field, d, 4);
        for (int t = 0; t < epi.height(); ++t)
            for (int x = 0; x < epi.width(); ++x) EXPECT_EQ(epi.at(t, x), epi.at(0, x));
    }
}

TEST(ExtractEpi, IndexAtHeightThrows) {
    const LightField field = epinet::testing::labeled_grid(1, 6, 6);
    EXPECT_THROW(extract_epi(field, Direction::Horizontal, 6), RangeError);
    EXPECT_THROW(extract_epi(field, Direction::Horizontal, -1), RangeError);
}

TEST(RoundTrip, IntegerDisparityNearestIsExact) {
    const int n = 3;
    const LightField field = constant_disparity_field(2.0f, n, 32, Interp::Nearest, 10);
    const DisparityMap d(32, 32, 2.0f);
    EXPECT_EQ(round_trip_margin(d, n), 6);
    const RoundTripReport r = round_trip_residual(field, d, nullptr, Interp::Nearest, round_trip_margin(d, n));
    EXPECT_GT(r.checked_pixels, 0u);
    EXPECT_LE(r.max_residual, 1e-6);
}

TEST(RoundTrip, WrongSignIsDetected) {
    const LightField field = constant_disparity_field(1.0f, 2, 24, Interp::Nearest, 11);
    const DisparityMap wrong(24, 24, -1.0f);
    const RoundTripReport r = round_trip_residual(field, wrong, nullptr, Interp::Nearest, 4);
    EXPECT_GT(r.max_residual, 0.1);
}

TEST(RoundTrip, RenderedTwoLayerSceneAwayFromOcclusions) {
    const synth::SceneSpec spec = synth::preset("occluder", 40, 40, 3);
    const synth::RenderedScene scene = synth::render(spec, 3, 40, 40);
    const RoundTripReport r = round_trip_residual(scene.lightfield, scene.disparity, &scene.occlusion,
                                                  Interp::Nearest,
                                                  round_trip_margin(scene.disparity, 3));
    EXPECT_GT(r.checked_pixels, 100u);
    EXPECT_LE(r.max_residual, 1e-6);
}

TEST(Raster, RotateFourTimesIsIdentity) {
    const Image img = epinet::testing::random_image(5, 7, 12, 3);
    EXPECT_EQ(rotate90(rotate90(rotate90(rotate90(img, 1), 1), 1), 1), img);
    EXPECT_EQ(rotate90(rotate90(img, 1), 1), rotate90(img, 2));
    EXPECT_EQ(rotate90(img, -1), rotate90(img, 3));
}

TEST(Raster, RotateIsClockwiseOnScreen) {
    Image img(2, 3);
    img.at(0, 2) = 1.0f;  // top-right corner
    const Image r = rotate90(img, 1);
    ASSERT_EQ(r.height(), 3);
    ASSERT_EQ(r.width(), 2);
    EXPECT_EQ(r.at(2, 1), 1.0f);  // moves to the bottom-right
}

TEST(Raster, FlipAndTransposeAreInvolutions) {
    const Image img = epinet::testing::random_image(4, 6, 13);
    EXPECT_EQ(flip_x(flip_x(img)), img);
    EXPECT_EQ(transpose(transpose(img)), img);
}

TEST(Raster, ReflectPadHasNoEdgeRepeat) {
    Image img(3, 4);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) img.at(y, x) = static_cast<float>(x);
    const Image p = pad_reflect(img, 2);
    const float expected[] = {2, 1, 0, 1, 2, 3, 2, 1};
    for (int x = 0; x < 8; ++x) EXPECT_EQ(p.at(2, x), expected[x]);
    EXPECT_THROW(pad_reflect(img, 3), ShapeError);
}

TEST(Raster, DilateGrowsBySquare) {
    Mask m(7, 7);
    m.at(3, 3) = 1;
    const Mask g = dilate(m, 2);
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 7; ++x)
            EXPECT_EQ(g.at(y, x) != 0, std::abs(y - 3) <= 2 && std::abs(x - 3) <= 2);
}

TEST(LightFieldType, ValidateRejectsOutOfRange) {
    LightField field = epinet::testing::labeled_grid(1, 3, 3);
    EXPECT_NO_THROW(field.validate());
    field.view(1, 1).at(0, 0) = 1.5f;
    EXPECT_THROW(field.validate(), DataError);
    EXPECT_THROW(field.set_view(0, 0, Image(2, 3)), ShapeError);
}
