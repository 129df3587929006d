#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epinet/lf/lightfield.hpp"

namespace epinet::synth {

enum class TextureKind { Checker, Sine, ValueNoise, Ramp };

/// Procedural texture, evaluated at continuous center-view coordinates.
struct Texture {
    TextureKind kind = TextureKind::ValueNoise;
    float scale = 8.0f;      // checker cell, sine period, or noise base period (px)
    float contrast = 1.0f;   // peak-to-peak amplitude
    float mean = 0.5f;
    int octaves = 3;         // value noise only
    float angle = 0.0f;      // sine grating orientation (radians)
    float ramp_dx = 0.0f;    // ramp slope per px
    float ramp_dy = 0.0f;
    std::uint64_t seed = 0;

    float evaluate(float x, float y) const;
};

struct Rect {
    float x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0, x1) x [y0, y1)
    bool contains(float x, float y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

/// d(x) = base + slope_x * (x - cx), cx the horizontal image center.
struct LayerDisparity {
    float base = 0.0f;
    float slope_x = 0.0f;
};

struct Layer {
    std::optional<Rect> region;  // empty = full frame
    LayerDisparity disparity;
    Texture texture;
    std::array<float, 3> tint = {1.0f, 1.0f, 1.0f};
};

/// Fronto-parallel (optionally slanted) textured layers ordered back to front.
struct SceneSpec {
    std::vector<Layer> layers;
    float noise_sigma = 0.0f;
    std::uint64_t seed = 0;
    float disparity_range = 4.0f;
    int channels = 1;
};

struct RenderedScene {
    lf::LightField lightfield;
    lf::DisparityMap disparity;  // front-most layer at each center pixel
    lf::Mask occlusion;          // center pixels whose ray is blocked in at least one grid view
};

/// Analytic renderer for a scene at fixed spatial size. Views can be produced
/// for any angular position, so angular crops around a shifted center can be
/// given exact ground truth.
class SceneRenderer {
public:
    SceneRenderer(SceneSpec spec, int height, int width);

    struct Hit {
        int layer = -1;
        float x = 0, y = 0;   // center-view coordinates on the layer
        float disparity = 0;
    };

    /// Front-most layer seen at continuous position (x, y) of view (u, v).
    Hit hit(int u, int v, float x, float y) const;

    /// Noise-free view (noise is added by render()).
    lf::Image view(int u, int v) const;
    lf::DisparityMap disparity(int u, int v) const;
    /// Pixels of view (cu, cv) whose scene point is hidden in some view of the
    /// (2N+1)^2 grid centered on (cu, cv).
    lf::Mask occlusion(int cu, int cv, int angular_extent) const;

    const SceneSpec& spec() const { return spec_; }
    int height() const { return height_; }
    int width() const { return width_; }

private:
    float layer_disparity(const Layer& l, float x) const;

    SceneSpec spec_;
    int height_;
    int width_;
    float cx_;
};

/// Throws SpecError: no layers, background not full frame, disparity outside
/// range, or a slant that folds the view mapping.
void validate(const SceneSpec& spec, int angular_extent, int height, int width);

RenderedScene render(const SceneSpec& spec, int angular_extent, int height, int width);

inline constexpr std::array<float, 5> kIntegerDisparities = {-2.0f, -1.0f, 0.0f, 1.0f, 2.0f};

/// Random fronto-parallel layers: a full-frame background and up to
/// max_layers - 1 rectangles, each at a disparity drawn from `disparities`
/// and textured with two-octave value noise.
SceneSpec layered_scene(int height, int width, std::uint64_t seed,
                        std::span<const float> disparities = kIntegerDisparities, int max_layers = 4);

/// Named presets exposed by the CLI: flat0, slant, occluder, noisy, layers.
SceneSpec preset(std::string_view name, int height, int width, std::uint64_t seed);
std::vector<std::string> preset_names();

}  // namespace epinet::synth
