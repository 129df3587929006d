#include <gtest/gtest.h>

#include "epinet/sampler/sampler.hpp"
#include "epinet/synth/scene.hpp"
#include "support/reference.hpp"

using namespace epinet;
using namespace epinet::sampler;

namespace {

lf::LightField warped_field(const lf::Image& center, int n) {
    lf::LightField field(n, center.height(), center.width(), 1);
    for (int v = -n; v <= n; ++v)
        for (int u = -n; u <= n; ++u) field.set_view(u, v, center);
    return field;
}

lf::Image checkerboard(int h, int w, float contrast) {
    lf::Image img(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(y, x) = 0.5f + ((x + y) % 2 ? 0.5f : -0.5f) * contrast;
    return img;
}

}  // namespace

TEST(Textureless, ConstantImageIsAllRejected) {
    const lf::Mask m = textureless_mask(lf::Image(30, 30, 1, 0.4f));
    for (auto v : m.data()) EXPECT_EQ(v, 1);
}

TEST(Textureless, CheckerboardIsAllKept) {
    const lf::Mask m = textureless_mask(checkerboard(30, 30, 0.5f));
    for (auto v : m.data()) EXPECT_EQ(v, 0);
}

TEST(Textureless, ExactThresholdIsKept) {
    // 3x3 window; center 0 and eight neighbours of value a: mean |diff| = 8a / 9,
    // exactly 2^-6 for a = (9/8) * 2^-6.
    const int patch = 3;
    lf::Image img(3, 3, 1, 0.0f);
    const float a = 0.017578125f;
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            if (y != 1 || x != 1) img.at(y, x) = a;
    const float mean_diff = 0.015625f;
    EXPECT_EQ(textureless_mask(img, patch, mean_diff).at(1, 1), 0);
    EXPECT_EQ(textureless_mask(img, patch, std::nextafter(mean_diff, 1.0f)).at(1, 1), 1);
}

TEST(Textureless, DefaultThresholdBoundaryOnRamp) {
    // 1-D ramp along x with slope s, 23x23 window fully inside: the mean
    // |I(p) - I(c)| over offsets -11..11 is s * 2 * (1 + ... + 11) / 23 = s * 132 / 23.
    const double s = 0.02 * 23.0 / 132.0;
    lf::Image img(40, 40);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x) img.at(y, x) = static_cast<float>(0.1 + s * x);
    const double measured = [&] {
        double sum = 0.0;
        for (int dy = -11; dy <= 11; ++dy)
            for (int dx = -11; dx <= 11; ++dx) sum += std::abs(img.at(20 + dy, 20 + dx) - img.at(20, 20));
        return sum / 529.0;
    }();
    const lf::Mask m = textureless_mask(img);
    EXPECT_EQ(m.at(20, 20), measured < kTexturelessThreshold ? 1 : 0);
    EXPECT_NEAR(measured, 0.02, 1e-6);
    // Slightly steeper is kept, slightly flatter is rejected.
    lf::Image steeper = img, flatter = img;
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x) {
            steeper.at(y, x) = static_cast<float>(0.1 + 1.01 * s * x);
            flatter.at(y, x) = static_cast<float>(0.1 + 0.99 * s * x);
        }
    EXPECT_EQ(textureless_mask(steeper).at(20, 20), 0);
    EXPECT_EQ(textureless_mask(flatter).at(20, 20), 1);
}

TEST(Eligible, FullImageCountIs490Squared) {
    const lf::Mask none(512, 512);
    const lf::Mask e = eligible_centers(none, 23);
    std::size_t n = 0;
    for (auto v : e.data()) n += v;
    EXPECT_EQ(n, 490u * 490u);
}

TEST(Eligible, WindowOverlapRejectsWholeNeighbourhood) {
    lf::Mask rejected(40, 40);
    rejected.at(20, 20) = 1;
    const lf::Mask e = eligible_centers(rejected, 23);
    std::size_t n = 0;
    for (auto v : e.data()) n += v;
    EXPECT_EQ(n, 0u);  // every valid center lies within 11 px of the pixel
    lf::Mask corner(40, 40);
    corner.at(0, 0) = 1;
    const lf::Mask e2 = eligible_centers(corner, 23);
    EXPECT_EQ(e2.at(11, 11), 0);
    EXPECT_EQ(e2.at(12, 11), 1);
}

TEST(SamplePatches, FullyMaskedSceneIsAnError) {
    const lf::LightField field = warped_field(lf::Image(30, 30, 1, 0.3f), 1);
    EXPECT_THROW(sample_patches(field, lf::DisparityMap(30, 30), nullptr, 10, 1), DataError);
}

TEST(SamplePatches, WindowsNeverTouchRejectedPixels) {
    const int size = 48, n = 3;
    const synth::RenderedScene s = synth::render(synth::preset("occluder", size, size, 2), n, size, size);
    lf::Mask excl(size, size);
    for (int y = 10; y < 20; ++y)
        for (int x = 5; x < 40; ++x) excl.at(y, x) = 1;
    const auto samples = sample_patches(s.lightfield, s.disparity, &excl, 300, 9);
    ASSERT_EQ(samples.size(), 300u);
    const lf::Mask tex = textureless_mask(lf::to_gray(s.lightfield.view(0, 0)));
    for (const auto& smp : samples) {
        EXPECT_EQ(smp.target, s.disparity.at(smp.center_y, smp.center_x));
        for (int dy = -11; dy <= 11; ++dy)
            for (int dx = -11; dx <= 11; ++dx) {
                const int y = smp.center_y + dy, x = smp.center_x + dx;
                ASSERT_TRUE(excl.contains(y, x));
                ASSERT_EQ(excl.at(y, x), 0);
                ASSERT_EQ(tex.at(y, x), 0);
            }
        EXPECT_EQ(smp.stack(lf::Direction::Horizontal).channels(), 7);
        EXPECT_EQ(smp.stack(lf::Direction::Horizontal).height(), 23);
    }
}

TEST(SamplePatches, ExhaustiveCheckOnSmallScene) {
    const int size = 30;
    lf::Image img = checkerboard(size, size, 0.5f);
    for (int y = 0; y < size; ++y)
        for (int x = 20; x < size; ++x) img.at(y, x) = 0.5f;  // flat band on the right
    const lf::LightField field = warped_field(img, 1);
    const lf::Mask rejected = textureless_mask(img);
    const lf::Mask eligible = eligible_centers(rejected, 23);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            bool clean = y >= 11 && x >= 11 && y + 11 < size && x + 11 < size;
            for (int dy = -11; clean && dy <= 11; ++dy)
                for (int dx = -11; clean && dx <= 11; ++dx) clean = !rejected.at(y + dy, x + dx);
            EXPECT_EQ(eligible.at(y, x) != 0, clean) << y << "," << x;
        }
}

TEST(SamplePatches, DeterministicUnderSeed) {
    const synth::RenderedScene s = synth::render(synth::preset("occluder", 40, 40, 3), 3, 40, 40);
    const auto a = sample_patches(s.lightfield, s.disparity, nullptr, 50, 4);
    const auto b = sample_patches(s.lightfield, s.disparity, nullptr, 50, 4);
    const auto c = sample_patches(s.lightfield, s.disparity, nullptr, 50, 5);
    ASSERT_EQ(a.size(), b.size());
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].center_y, b[i].center_y);
        EXPECT_EQ(a[i].center_x, b[i].center_x);
        EXPECT_EQ(a[i].stacks, b[i].stacks);
        any_diff |= a[i].center_y != c[i].center_y || a[i].center_x != c[i].center_x;
    }
    EXPECT_TRUE(any_diff);
}

TEST(SampleScenes, SplitsCountEvenly) {
    std::vector<LabeledScene> scenes;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        synth::RenderedScene s = synth::render(synth::layered_scene(32, 32, seed), 3, 32, 32);
        scenes.push_back({std::move(s.lightfield), std::move(s.disparity), std::nullopt});
    }
    const auto samples = sample_scenes(scenes, 10, 7);
    ASSERT_EQ(samples.size(), 10u);
    const auto again = sample_scenes(scenes, 10, 7);
    for (std::size_t i = 0; i < samples.size(); ++i) EXPECT_EQ(samples[i].stacks, again[i].stacks);
    EXPECT_THROW(sample_scenes({}, 10, 7), DataError);
}
