#include "epinet/augment/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace epinet::augment {
namespace {

bool all_integral(const lf::DisparityMap& d) {
    return std::all_of(d.data().begin(), d.data().end(), [](float x) { return x == std::round(x); });
}

// Blocks that mix disparities cannot satisfy the scaled correspondence.
lf::Mask scale_exclusion(const lf::Mask& m, const lf::DisparityMap& d, int n) {
    lf::Mask out = scale_mask(m, n);
    const int h = d.height() / n * n, w = d.width() / n * n;
    const int y0 = (d.height() - h) / 2, x0 = (d.width() - w) / 2;
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            float lo = d.at(y0 + y * n, x0 + x * n), hi = lo;
            for (int dy = 0; dy < n; ++dy)
                for (int dx = 0; dx < n; ++dx) {
                    const float v = d.at(y0 + y * n + dy, x0 + x * n + dx);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            if (hi - lo > 0.05f) out.at(y, x) = 1;
        }
    }
    return out;
}

}  // namespace

PairCheck check_pair(const LabeledField& f, const lf::Mask& exclude) {
    PairCheck c;
    const int margin = lf::round_trip_margin(f.disparity, f.lightfield.angular_extent());
    if (all_integral(f.disparity)) {
        c.interp = lf::Interp::Nearest;
        c.tolerance = kNearestTolerance;
        const auto r = lf::round_trip_residual(f.lightfield, f.disparity, &exclude, c.interp, margin);
        c.residual = r.max_residual;
        c.checked_pixels = r.checked_pixels;
    } else {
        c.interp = lf::Interp::Bilinear;
        c.tolerance = kBilinearTolerance;
        const lf::Mask grown = lf::dilate(exclude, 1);
        const auto r = lf::round_trip_residual(f.lightfield, f.disparity, &grown, c.interp, margin + 1);
        c.residual = r.max_residual;
        c.checked_pixels = r.checked_pixels;
    }
    c.pass = c.checked_pixels > 0 && c.residual <= c.tolerance;
    return c;
}

ProductReport validate_specs(const synth::SceneSpec& scene, int height, int width,
                             const std::vector<AugmentationSpec>& specs, int n_src, int n_dst) {
    const synth::RenderedScene base = synth::render(scene, n_src, height, width);
    const synth::SceneRenderer renderer(scene, height, width);
    ProductReport report;
    for (const AugmentationSpec& spec : specs) {
        AugmentationSpec geometric = spec;
        geometric.scale_n = 1;
        LabeledField f = apply(geometric, base.lightfield,
                               [&](int du, int dv) { return renderer.disparity(du, dv); }, n_dst);
        lf::Mask mask = renderer.occlusion(spec.shift_u, spec.shift_v, n_dst);
        if (spec.rotation != 0) mask = rotate_mask(mask, spec.rotation);
        if (spec.flip) mask = lf::flip_x(mask);
        if (spec.transpose) mask = lf::transpose(mask);
        if (spec.scale_n != 1) {
            mask = scale_exclusion(mask, f.disparity, spec.scale_n);
            f = scale_lf(f.lightfield, f.disparity, spec.scale_n);
        }
        PairCheck c = check_pair(f, mask);
        c.spec = spec;
        if (c.interp == lf::Interp::Nearest) {
            report.max_nearest = std::max(report.max_nearest, c.residual);
        } else {
            report.max_bilinear = std::max(report.max_bilinear, c.residual);
        }
        report.all_pass = report.all_pass && c.pass;
        report.checks.push_back(c);
    }
    return report;
}

synth::SceneSpec band_limited(synth::SceneSpec scene, float period, float contrast) {
    for (auto& layer : scene.layers) {
        layer.texture.kind = synth::TextureKind::ValueNoise;
        layer.texture.octaves = 1;
        layer.texture.scale = period;
        layer.texture.contrast = contrast;
    }
    return scene;
}

std::vector<AugmentationSpec> transpose_specs() {
    std::vector<AugmentationSpec> out;
    for (int f = 0; f < 2; ++f)
        for (int r = 0; r < 360; r += 90) {
            AugmentationSpec s;
            s.rotation = r;
            s.flip = f == 1;
            s.transpose = true;
            out.push_back(s);
        }
    return out;
}

GeometrySuite run_geometry_suite(int size, std::uint64_t seed) {
    GeometrySuite suite;
    const auto product = enumerate_product();
    std::set<std::string> distinct;
    for (const auto& s : product) distinct.insert(s.to_string());
    suite.product_size = product.size();
    suite.distinct_specs = distinct.size();

    std::vector<AugmentationSpec> unscaled;
    for (const auto& s : product)
        if (s.scale_n == 1) unscaled.push_back(s);
    const auto transposed = transpose_specs();

    auto run = [&](const std::string& scene_name, const synth::SceneSpec& scene, const std::string& set_name,
                   const std::vector<AugmentationSpec>& specs) {
        SuiteEntry e{scene_name, set_name, validate_specs(scene, size, size, specs)};
        suite.all_pass = suite.all_pass && e.report.all_pass;
        suite.entries.push_back(std::move(e));
    };
    for (const char* name : {"flat0", "occluder"}) {
        const synth::SceneSpec scene = synth::preset(name, size, size, seed);
        run(name, scene, "unscaled", unscaled);
        run(name, scene, "transpose", transposed);
    }
    const float period = static_cast<float>(size) / 3.0f;
    for (const char* name : {"slant", "occluder"}) {
        const synth::SceneSpec scene = band_limited(synth::preset(name, size, size, seed), period);
        const std::string label = std::string(name) + "-smooth";
        run(label, scene, "product", product);
        run(label, scene, "transpose", transposed);
    }
    suite.all_pass = suite.all_pass && suite.product_size == 288 && suite.distinct_specs == 288;
    return suite;
}

}  // namespace epinet::augment
