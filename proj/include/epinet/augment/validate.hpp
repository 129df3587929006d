#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epinet/augment/augment.hpp"
#include "epinet/synth/scene.hpp"

namespace epinet::augment {

inline constexpr double kNearestTolerance = 1e-6;
inline constexpr double kBilinearTolerance = 2e-2;

struct PairCheck {
    AugmentationSpec spec;
    lf::Interp interp = lf::Interp::Nearest;
    double residual = 0.0;
    double tolerance = 0.0;
    std::size_t checked_pixels = 0;
    bool pass = false;
};

/// Round-trip check of one augmented pair. Integer disparities are checked
/// with nearest sampling at kNearestTolerance, anything else with bilinear
/// sampling at kBilinearTolerance and the exclusion mask grown by one pixel.
PairCheck check_pair(const LabeledField& f, const lf::Mask& exclude);

struct ProductReport {
    std::vector<PairCheck> checks;
    double max_nearest = 0.0;
    double max_bilinear = 0.0;
    bool all_pass = true;
};

/// Renders the scene on a (2 n_src + 1)^2 grid, applies every spec and checks
/// each result. Occlusions are taken from the renderer for the shifted center
/// and carried through the same geometry; blocks that straddle a depth edge
/// are excluded after scaling.
ProductReport validate_specs(const synth::SceneSpec& scene, int height, int width,
                             const std::vector<AugmentationSpec>& specs, int n_src = 4, int n_dst = 3);

/// Scene with every layer's texture replaced by single-octave value noise of
/// the given period and contrast, so bilinear resampling error stays small.
synth::SceneSpec band_limited(synth::SceneSpec scene, float period, float contrast = 0.6f);

struct SuiteEntry {
    std::string scene;
    std::string specs;
    ProductReport report;
};

struct GeometrySuite {
    std::vector<SuiteEntry> entries;
    std::size_t product_size = 0;
    std::size_t distinct_specs = 0;
    bool all_pass = true;
};

/// Transposed specs: 4 rotations x flip off/on, no shift or scale.
std::vector<AugmentationSpec> transpose_specs();

/// The full geometry check on size x size scenes:
///  - detailed flat0 and occluder presets with every integer-disparity spec
///    (no scaling) and the transposed specs, all checked with nearest sampling;
///  - band-limited slant and occluder scenes with the full product and the
///    transposed specs.
GeometrySuite run_geometry_suite(int size = 96, std::uint64_t seed = 1);

}  // namespace epinet::augment
