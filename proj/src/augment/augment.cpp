#include "epinet/augment/augment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace epinet::augment {
namespace {

template <typename Spatial>
lf::LightField remap_field(const lf::LightField& src, const AngularMap& map, Spatial spatial) {
    const int n = src.angular_extent();
    const lf::Image probe = spatial(src.view(0, 0));
    lf::LightField out(n, probe.height(), probe.width(), src.channels());
    for (int v = -n; v <= n; ++v) {
        for (int u = -n; u <= n; ++u) {
            const auto [nu, nv] = map.apply(u, v);
            out.set_view(nu, nv, spatial(src.view(u, v)));
        }
    }
    return out;
}

AngularMap compose(const AngularMap& outer, const AngularMap& inner) {
    return {outer.a * inner.a + outer.b * inner.c, outer.a * inner.b + outer.b * inner.d,
            outer.c * inner.a + outer.d * inner.c, outer.c * inner.b + outer.d * inner.d};
}

int quarter_turns(int angle) {
    if (angle % 90 != 0) throw RangeError("rotation must be a multiple of 90 degrees");
    return ((angle / 90) % 4 + 4) % 4;
}

template <typename T, typename Reduce>
lf::Raster<T> block_reduce(const lf::Raster<T>& src, int n, Reduce reduce) {
    const int h = src.height() / n * n, w = src.width() / n * n;
    const int y0 = (src.height() - h) / 2, x0 = (src.width() - w) / 2;
    lf::Raster<T> out(h / n, w / n, src.channels());
    std::vector<T> block(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < src.channels(); ++c) {
        for (int y = 0; y < out.height(); ++y) {
            for (int x = 0; x < out.width(); ++x) {
                std::size_t k = 0;
                for (int dy = 0; dy < n; ++dy)
                    for (int dx = 0; dx < n; ++dx) block[k++] = src.at(y0 + y * n + dy, x0 + x * n + dx, c);
                out.at(y, x, c) = reduce(block);
            }
        }
    }
    return out;
}

float box_mean(const std::vector<float>& block) {
    double s = 0.0;
    for (float v : block) s += v;
    return static_cast<float>(s / static_cast<double>(block.size()));
}

}  // namespace

std::string AugmentationSpec::to_string() const {
    std::ostringstream os;
    os << "shift=(" << shift_u << "," << shift_v << ") rot=" << rotation << " flip=" << flip
       << " transpose=" << transpose << " scale=1/" << scale_n << " gain=" << color_gain << " gray=" << gray_mix
       << " gamma=" << gamma;
    return os.str();
}

AngularMap AngularMap::inverse() const {
    const int det = a * d - b * c;
    if (det != 1 && det != -1) throw RangeError("angular map is not invertible over the integers");
    return {d * det, -b * det, -c * det, a * det};
}

AngularMap angular_map(Symmetry s) {
    switch (s) {
        case Symmetry::Rotate90: return {0, -1, 1, 0};
        case Symmetry::Flip: return {1, 0, 0, -1};
        case Symmetry::Transpose: return {0, 1, 1, 0};
    }
    return {};
}

LabeledField view_shift(const lf::LightField& src, const lf::DisparityMap& gt, int du, int dv, int n_dst) {
    const int n_src = src.angular_extent();
    if (n_dst < 1 || n_dst > n_src) throw AngularIndexError("target angular extent outside [1, N_src]");
    const int room = n_src - n_dst;
    if (std::abs(du) > room || std::abs(dv) > room) {
        std::ostringstream os;
        os << "view shift (" << du << ", " << dv << ") exceeds N_src - N_dst = " << room;
        throw AngularIndexError(os.str());
    }
    if (gt.height() != src.height() || gt.width() != src.width()) {
        throw ShapeError("shifted-center ground truth does not match the light field");
    }
    lf::LightField out(n_dst, src.height(), src.width(), src.channels());
    for (int v = -n_dst; v <= n_dst; ++v)
        for (int u = -n_dst; u <= n_dst; ++u) out.set_view(u, v, src.view(u + du, v + dv));
    return {std::move(out), gt};
}

LabeledField rotate_lf(const lf::LightField& src, const lf::DisparityMap& d, int angle) {
    const int q = quarter_turns(angle);
    if (q % 2 == 1 && src.height() != src.width()) {
        throw ShapeError("90/270 degree rotation requires square views");
    }
    AngularMap map;
    for (int i = 0; i < q; ++i) map = compose(angular_map(Symmetry::Rotate90), map);
    auto spatial = [q](const lf::Image& img) { return lf::rotate90(img, q); };
    return {remap_field(src, map, spatial), lf::rotate90(d, q)};
}

LabeledField flip_lf(const lf::LightField& src, const lf::DisparityMap& d) {
    auto spatial = [](const lf::Image& img) { return lf::flip_x(img); };
    lf::DisparityMap flipped = lf::flip_x(d);
    for (float& x : flipped.data()) x = -x;
    return {remap_field(src, angular_map(Symmetry::Flip), spatial), std::move(flipped)};
}

LabeledField transpose_lf(const lf::LightField& src, const lf::DisparityMap& d) {
    auto spatial = [](const lf::Image& img) { return lf::transpose(img); };
    return {remap_field(src, angular_map(Symmetry::Transpose), spatial), lf::transpose(d)};
}

LabeledField scale_lf(const lf::LightField& src, const lf::DisparityMap& d, int n) {
    if (n < 1 || n > 4) throw RangeError("scale factor must be 1/N with N in 1..4");
    if (n == 1) return {src, d};
    if (src.height() < n || src.width() < n) throw ShapeError("views smaller than the scale block");
    const int na = src.angular_extent();
    const int h = src.height() / n, w = src.width() / n;
    lf::LightField out(na, h, w, src.channels());
    for (int v = -na; v <= na; ++v)
        for (int u = -na; u <= na; ++u) out.set_view(u, v, block_reduce(src.view(u, v), n, box_mean));
    lf::Image dv = block_reduce(d.raster(), n, box_mean);
    const float inv = 1.0f / static_cast<float>(n);
    for (float& x : dv.data()) x *= inv;
    return {std::move(out), lf::DisparityMap(std::move(dv))};
}

lf::LightField photometric(const lf::LightField& src, float gain, float gray_mix, float gamma) {
    const int n = src.angular_extent();
    lf::LightField out(n, src.height(), src.width(), src.channels());
    for (int v = -n; v <= n; ++v) {
        for (int u = -n; u <= n; ++u) {
            lf::Image img = src.view(u, v);
            for (float& p : img.data()) p = std::clamp(p * gain, 0.0f, 1.0f);
            if (img.channels() == 3 && gray_mix != 0.0f) {
                const lf::Image luma = lf::to_gray(img);
                for (int c = 0; c < 3; ++c) {
                    auto plane = img.plane(c);
                    auto g = luma.plane(0);
                    for (std::size_t i = 0; i < plane.size(); ++i)
                        plane[i] = (1.0f - gray_mix) * plane[i] + gray_mix * g[i];
                }
            }
            if (gamma != 1.0f) {
                for (float& p : img.data()) p = std::pow(p, gamma);
            }
            for (float& p : img.data()) p = std::clamp(p, 0.0f, 1.0f);
            out.set_view(u, v, std::move(img));
        }
    }
    return out;
}

lf::Mask rotate_mask(const lf::Mask& m, int angle) { return lf::rotate90(m, quarter_turns(angle)); }

lf::Mask scale_mask(const lf::Mask& m, int n) {
    if (n == 1) return m;
    return block_reduce(m, n, [](const std::vector<std::uint8_t>& b) {
        return static_cast<std::uint8_t>(std::any_of(b.begin(), b.end(), [](std::uint8_t x) { return x != 0; }));
    });
}

std::vector<AugmentationSpec> enumerate_product(int n_src, int n_dst) {
    if (n_dst < 1 || n_dst > n_src) throw AngularIndexError("target angular extent outside [1, N_src]");
    const int room = n_src - n_dst;
    std::vector<AugmentationSpec> out;
    for (int dv = -room; dv <= room; ++dv)
        for (int du = -room; du <= room; ++du)
            for (int rot = 0; rot < 360; rot += 90)
                for (bool flip : {false, true})
                    for (int scale = 1; scale <= 4; ++scale) {
                        AugmentationSpec s;
                        s.shift_u = du;
                        s.shift_v = dv;
                        s.rotation = rot;
                        s.flip = flip;
                        s.scale_n = scale;
                        out.push_back(s);
                    }
    return out;
}

void sample_photometric(AugmentationSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<float> gain(0.5f, 2.0f), mix(0.0f, 1.0f), gamma(0.8f, 1.2f);
    spec.color_gain = gain(rng);
    spec.gray_mix = mix(rng);
    spec.gamma = gamma(rng);
}

LabeledField apply(const AugmentationSpec& spec, const lf::LightField& src, const CenterTruth& truth, int n_dst) {
    LabeledField f = view_shift(src, truth(spec.shift_u, spec.shift_v), spec.shift_u, spec.shift_v, n_dst);
    if (spec.color_gain != 1.0f || spec.gray_mix != 0.0f || spec.gamma != 1.0f) {
        f.lightfield = photometric(f.lightfield, spec.color_gain, spec.gray_mix, spec.gamma);
    }
    if (spec.rotation != 0) f = rotate_lf(f.lightfield, f.disparity, spec.rotation);
    if (spec.flip) f = flip_lf(f.lightfield, f.disparity);
    if (spec.transpose) f = transpose_lf(f.lightfield, f.disparity);
    if (spec.scale_n != 1) f = scale_lf(f.lightfield, f.disparity, spec.scale_n);
    return f;
}

StackSource stack_source(const AngularMap& map, lf::Direction dst, int t) {
    const auto [su, sv] = lf::angular_step(dst);
    // Image of the unit step; the whole line follows with the same sign.
    const auto [ou, ov] = map.inverse().apply(su, sv);
    for (lf::Direction d : lf::kAllDirections) {
        const auto [du, dv] = lf::angular_step(d);
        for (int sign : {1, -1}) {
            if (sign * du == ou && sign * dv == ov) return {d, sign * t};
        }
    }
    throw RangeError("angular map does not preserve the four stack directions");
}

lf::StackSet rearrange_stacks(const lf::StackSet& original, Symmetry s) {
    const AngularMap map = angular_map(s);
    auto spatial = [s](const lf::Image& img) {
        switch (s) {
            case Symmetry::Rotate90: return lf::rotate90(img, 1);
            case Symmetry::Flip: return lf::flip_x(img);
            case Symmetry::Transpose: return lf::transpose(img);
        }
        return img;
    };
    lf::StackSet out;
    for (lf::Direction dst : lf::kAllDirections) {
        const auto& src_views = original[dst].views;
        const int n = static_cast<int>(src_views.size()) / 2;
        lf::ViewStack& stack = out[dst];
        stack.direction = dst;
        for (int t = -n; t <= n; ++t) {
            const StackSource from = stack_source(map, dst, t);
            stack.views.push_back(spatial(original[from.direction].views[from.position + n]));
        }
    }
    return out;
}

}  // namespace epinet::augment
