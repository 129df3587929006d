#include "epinet/synth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace epinet::synth {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

float lattice(std::int64_t ix, std::int64_t iy, int octave, std::uint64_t seed) {
    std::uint64_t h = splitmix(seed ^ splitmix(static_cast<std::uint64_t>(octave) + 0x51ull));
    h = splitmix(h ^ static_cast<std::uint64_t>(ix));
    h = splitmix(h ^ static_cast<std::uint64_t>(iy));
    return static_cast<float>(h >> 40) / static_cast<float>(1ull << 24);
}

// Quintic fade: C2-continuous, keeps bilinear resampling error small.
double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double value_noise(double x, double y, int octave, std::uint64_t seed) {
    const double fx = std::floor(x), fy = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
    const double tx = fade(x - fx), ty = fade(y - fy);
    const double a = lattice(ix, iy, octave, seed), b = lattice(ix + 1, iy, octave, seed);
    const double c = lattice(ix, iy + 1, octave, seed), d = lattice(ix + 1, iy + 1, octave, seed);
    const double top = a + tx * (b - a), bottom = c + tx * (d - c);
    return top + ty * (bottom - top);
}

}  // namespace

float Texture::evaluate(float x, float y) const {
    double t = 0.5;
    switch (kind) {
        case TextureKind::Checker: {
            const auto cx = static_cast<std::int64_t>(std::floor(x / scale));
            const auto cy = static_cast<std::int64_t>(std::floor(y / scale));
            t = ((cx + cy) % 2 == 0) ? 1.0 : 0.0;
            break;
        }
        case TextureKind::Sine: {
            const double phase = (x * std::cos(angle) + y * std::sin(angle)) / scale;
            t = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * phase);
            break;
        }
        case TextureKind::ValueNoise: {
            double sum = 0.0, norm = 0.0, amp = 1.0, period = scale;
            for (int o = 0; o < std::max(1, octaves); ++o) {
                sum += amp * value_noise(x / period, y / period, o, seed);
                norm += amp;
                amp *= 0.5;
                period *= 0.5;
            }
            t = sum / norm;
            break;
        }
        case TextureKind::Ramp:
            return std::clamp(mean + ramp_dx * x + ramp_dy * y, 0.0f, 1.0f);
    }
    return std::clamp(static_cast<float>(mean + contrast * (t - 0.5)), 0.0f, 1.0f);
}

SceneRenderer::SceneRenderer(SceneSpec spec, int height, int width)
    : spec_(std::move(spec)), height_(height), width_(width), cx_(0.5f * static_cast<float>(width - 1)) {}

float SceneRenderer::layer_disparity(const Layer& l, float x) const {
    return l.disparity.base + l.disparity.slope_x * (x - cx_);
}

SceneRenderer::Hit SceneRenderer::hit(int u, int v, float x, float y) const {
    for (int k = static_cast<int>(spec_.layers.size()) - 1; k >= 0; --k) {
        const Layer& l = spec_.layers[k];
        // Invert x' = x + d(x) * u for the linear disparity model.
        const float xc = cx_ + ((x - cx_) - l.disparity.base * static_cast<float>(u)) /
                                   (1.0f + l.disparity.slope_x * static_cast<float>(u));
        const float d = layer_disparity(l, xc);
        const float yc = y - d * static_cast<float>(v);
        if (!l.region || l.region->contains(xc, yc)) return {k, xc, yc, d};
    }
    return {};
}

lf::Image SceneRenderer::view(int u, int v) const {
    lf::Image img(height_, width_, spec_.channels);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const Hit h = hit(u, v, static_cast<float>(x), static_cast<float>(y));
            if (h.layer < 0) throw SpecError("pixel not covered by any layer");
            const Layer& l = spec_.layers[h.layer];
            const float t = l.texture.evaluate(h.x, h.y);
            for (int c = 0; c < spec_.channels; ++c) {
                const float tint = spec_.channels == 1 ? 1.0f : l.tint[c];
                img.at(y, x, c) = std::clamp(t * tint, 0.0f, 1.0f);
            }
        }
    }
    return img;
}

lf::DisparityMap SceneRenderer::disparity(int u, int v) const {
    lf::DisparityMap d(height_, width_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            d.at(y, x) = hit(u, v, static_cast<float>(x), static_cast<float>(y)).disparity;
    return d;
}

lf::Mask SceneRenderer::occlusion(int cu, int cv, int n) const {
    lf::Mask mask(height_, width_);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const Hit h = hit(cu, cv, static_cast<float>(x), static_cast<float>(y));
            bool blocked = false;
            for (int b = -n; b <= n && !blocked; ++b) {
                for (int a = -n; a <= n && !blocked; ++a) {
                    const int wu = cu + a, wv = cv + b;
                    const float px = h.x + h.disparity * static_cast<float>(wu);
                    const float py = h.y + h.disparity * static_cast<float>(wv);
                    if (px < 0.0f || py < 0.0f || px > static_cast<float>(width_ - 1) ||
                        py > static_cast<float>(height_ - 1)) {
                        continue;
                    }
                    blocked = hit(wu, wv, px, py).layer != h.layer;
                }
            }
            mask.at(y, x) = blocked ? 1 : 0;
        }
    }
    return mask;
}

void validate(const SceneSpec& spec, int n, int height, int width) {
    if (spec.layers.empty()) throw SpecError("scene has no layers");
    if (spec.layers.front().region) throw SpecError("back layer must cover the full frame");
    if (spec.channels != 1 && spec.channels != 3) throw SpecError("scene channels must be 1 or 3");
    if (spec.noise_sigma < 0.0f) throw SpecError("noise sigma must be non-negative");
    const float cx = 0.5f * static_cast<float>(width - 1);
    for (std::size_t k = 0; k < spec.layers.size(); ++k) {
        const Layer& l = spec.layers[k];
        float xa = 0.0f, xb = static_cast<float>(width - 1);
        if (l.region) {
            xa = std::max(xa, l.region->x0);
            xb = std::min(xb, l.region->x1);
        }
        for (float x : {xa, xb}) {
            const float d = l.disparity.base + l.disparity.slope_x * (x - cx);
            if (!std::isfinite(d) || std::abs(d) > spec.disparity_range) {
                std::ostringstream os;
                os << "layer " << k << " disparity " << d << " outside +-" << spec.disparity_range;
                throw SpecError(os.str());
            }
        }
        if (std::abs(l.disparity.slope_x) * static_cast<float>(n) >= 1.0f) {
            throw SpecError("disparity slope too steep for the angular extent");
        }
    }
    (void)height;
}

RenderedScene render(const SceneSpec& spec, int n, int height, int width) {
    validate(spec, n, height, width);
    SceneRenderer renderer(spec, height, width);
    RenderedScene out{lf::LightField(n, height, width, spec.channels), renderer.disparity(0, 0),
                      renderer.occlusion(0, 0, n)};
    const int side = 2 * n + 1;
    for (int v = -n; v <= n; ++v) {
        for (int u = -n; u <= n; ++u) {
            lf::Image img = renderer.view(u, v);
            if (spec.noise_sigma > 0.0f) {
                const auto slot = static_cast<std::uint64_t>((v + n) * side + (u + n));
                std::mt19937_64 rng(splitmix(spec.seed) ^ splitmix(slot + 1));
                std::normal_distribution<float> noise(0.0f, spec.noise_sigma);
                for (float& p : img.data()) p = std::clamp(p + noise(rng), 0.0f, 1.0f);
            }
            out.lightfield.set_view(u, v, std::move(img));
        }
    }
    return out;
}

SceneSpec layered_scene(int height, int width, std::uint64_t seed, std::span<const float> disparities,
                        int max_layers) {
    if (disparities.empty()) throw SpecError("layered scene needs at least one disparity level");
    std::mt19937_64 rng(splitmix(seed ^ 0x6c61796572ull));
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto uniform = [&](float lo, float hi) { return std::uniform_real_distribution<float>(lo, hi)(rng); };
    auto texture = [&] {
        Texture t;
        t.kind = TextureKind::ValueNoise;
        t.scale = uniform(4.0f, 10.0f);
        t.octaves = 2;
        t.seed = rng();
        return t;
    };
    SceneSpec s;
    s.seed = seed;
    Layer back;
    back.disparity.base = disparities[pick(0, static_cast<int>(disparities.size()) - 1)];
    back.texture = texture();
    s.layers.push_back(back);
    const int extra = pick(1, std::max(1, max_layers - 1));
    for (int i = 0; i < extra; ++i) {
        Layer l;
        const float w = uniform(0.25f, 0.5f) * static_cast<float>(width);
        const float h = uniform(0.25f, 0.5f) * static_cast<float>(height);
        const float x0 = uniform(0.0f, static_cast<float>(width) - w);
        const float y0 = uniform(0.0f, static_cast<float>(height) - h);
        l.region = Rect{x0, y0, x0 + w, y0 + h};
        l.disparity.base = disparities[pick(0, static_cast<int>(disparities.size()) - 1)];
        l.texture = texture();
        s.layers.push_back(l);
    }
    return s;
}

std::vector<std::string> preset_names() { return {"flat0", "slant", "occluder", "noisy", "layers"}; }

SceneSpec preset(std::string_view name, int height, int width, std::uint64_t seed) {
    SceneSpec s;
    s.seed = seed;
    Layer back;
    back.texture.kind = TextureKind::ValueNoise;
    back.texture.scale = 8.0f;
    back.texture.octaves = 3;
    back.texture.seed = seed;
    back.tint = {1.0f, 0.8f, 0.6f};
    if (name == "flat0") {
        s.layers = {back};
    } else if (name == "slant") {
        back.disparity = {0.5f, 1.5f / static_cast<float>(std::max(1, width))};
        s.layers = {back};
    } else if (name == "occluder" || name == "noisy") {
        back.disparity.base = -1.0f;
        Layer front;
        front.region = Rect{width / 3.0f, height / 3.0f, 2.0f * width / 3.0f, 2.0f * height / 3.0f};
        front.disparity.base = 1.0f;
        front.texture.kind = TextureKind::ValueNoise;
        front.texture.scale = 6.0f;
        front.texture.seed = seed + 1;
        front.tint = {0.6f, 0.9f, 1.0f};
        s.layers = {back, front};
        if (name == "noisy") s.noise_sigma = 0.02f;
    } else if (name == "layers") {
        return layered_scene(height, width, seed);
    } else {
        throw SpecError("unknown scene preset '" + std::string(name) + "'");
    }
    return s;
}

}  // namespace epinet::synth
