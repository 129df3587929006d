// End-to-end acceptance checks A1-A8. Prints one PASS/FAIL line per criterion
// and exits nonzero if any criterion fails. Pass criterion names (A1 A5 ...)
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "epinet/augment/validate.hpp"
#include "epinet/cli/commands.hpp"
#include "epinet/eval/metrics.hpp"
#include "epinet/eval/weighted_median.hpp"
#include "epinet/model/infer.hpp"
#include "epinet/model/train.hpp"
#include "epinet/nn/gradcheck.hpp"
#include "epinet/sampler/sampler.hpp"
#include "epinet/synth/scene.hpp"
#include "support/reference.hpp"

using namespace epinet;

namespace {

// Pinned tolerances and budgets.
constexpr double kGradLinearTol = 1e-6;
constexpr double kGradNonlinearTol = 1e-4;
constexpr int kGradShapes = 100;
constexpr double kGradBudgetS = 60.0;

constexpr std::size_t kAugmentProduct = 288;

constexpr int kOverfitIters = 5000;
constexpr int kOverfitBatch = 16;
constexpr double kOverfitLr = 1e-5;
constexpr int kOverfitPatches = 2000;
constexpr int kOverfitExtent = 3;
constexpr int kSceneSize = 64;
constexpr int kTrainScenes = 5;
constexpr int kValidationScenes = 2;
constexpr std::uint64_t kValidationSeedBase = 100;
constexpr double kOverfitMaeTol = 0.1;
constexpr double kOverfitBadPixPct = 15.0;
constexpr float kOverfitBadPixThreshold = 0.07f;
constexpr double kOverfitBudgetS = 1800.0;
constexpr std::uint64_t kRunSeeds[] = {1, 2, 3};

constexpr int kEquivalenceSize = 64;
constexpr int kMetricCases = 100;
constexpr int kMedianWindows = 100;

constexpr std::size_t kParamsLow = 4'600'000;
constexpr std::size_t kParamsHigh = 5'600'000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

std::string join(const std::vector<double>& v, int precision = 4) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "/" : "") + fmt(v[i], precision);
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome report(const std::string& id, Outcome o) {
    std::cout << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    return o;
}

// ---------------------------------------------------------------- A1

Outcome check_gradients() {
    const auto t0 = Clock::now();
    const nn::GradCheckReport r = nn::run_gradcheck(kGradShapes, 1);
    const double secs = seconds_since(t0);
    const bool pass = r.all_pass && r.max_linear < kGradLinearTol && r.max_nonlinear < kGradNonlinearTol &&
                      secs < kGradBudgetS;
    return {pass, std::to_string(r.cases.size()) + " cases over " + std::to_string(kGradShapes) +
                      " shapes, max rel err linear " + fmt(r.max_linear, 3) + " (< 1e-6), nonlinear " +
                      fmt(r.max_nonlinear, 3) + " (< 1e-4), " + fmt(secs, 3) + " s (< 60 s)"};
}

// ---------------------------------------------------------------- A2

Outcome check_geometry() {
    const augment::GeometrySuite s = augment::run_geometry_suite(96, 1);
    std::size_t checks = 0, failed = 0;
    for (const auto& e : s.entries)
        for (const auto& c : e.report.checks) {
            ++checks;
            failed += !c.pass;
        }
    const bool pass = s.all_pass && failed == 0 && s.product_size == kAugmentProduct &&
                      s.distinct_specs == kAugmentProduct;
    return {pass, std::to_string(checks) + " round-trip checks, " + std::to_string(failed) +
                      " failed; enumerate_product " + std::to_string(s.product_size) + " specs, " +
                      std::to_string(s.distinct_specs) + " distinct (expect 288)"};
}

// ---------------------------------------------------------------- A3 / A4

sampler::LabeledScene layered(std::uint64_t seed) {
    const synth::RenderedScene s =
        synth::render(synth::layered_scene(kSceneSize, kSceneSize, seed), kOverfitExtent, kSceneSize, kSceneSize);
    return {s.lightfield, s.disparity, std::nullopt};
}

struct SceneError {
    double mae = 0;
    double badpix = 0;
};

// Pooled over the crop-mode interiors of all scenes.
SceneError full_image_error(model::Epinet& net, std::span<const sampler::LabeledScene> scenes) {
    lf::DisparityMap pred_all, gt_all;
    std::vector<float> pred, gt;
    for (const auto& s : scenes) {
        const model::InferResult r = model::infer_full(net, s.lightfield, model::Padding::Crop);
        const lf::DisparityMap g(
            lf::crop(s.disparity.raster(), r.border, r.border, r.disparity.height(), r.disparity.width()));
        pred.insert(pred.end(), r.disparity.data().begin(), r.disparity.data().end());
        gt.insert(gt.end(), g.data().begin(), g.data().end());
    }
    lf::DisparityMap p(1, static_cast<int>(pred.size())), g(1, static_cast<int>(gt.size()));
    p.data() = pred;
    g.data() = gt;
    return {eval::mae(p, g), eval::badpix(p, g, kOverfitBadPixThreshold)};
}

struct RunResult {
    SceneError train;
    SceneError validation;
    double seconds = 0;
    double final_loss = 0;
};

RunResult overfit_run(const model::EpinetConfig& cfg, std::uint64_t seed,
                      std::span<const sampler::LabeledScene> train_scenes,
                      std::span<const sampler::LabeledScene> validation_scenes) {
    const auto t0 = Clock::now();
    const std::vector<model::Sample> samples = sampler::sample_scenes(train_scenes, kOverfitPatches, seed, cfg.patch);
    model::Epinet net(cfg);
    net.init(seed);
    model::TrainOptions o;
    o.iterations = kOverfitIters;
    o.batch = kOverfitBatch;
    o.lr = kOverfitLr;
    o.seed = seed;
    o.log_every = 1000;
    const model::TrainResult tr = model::train(net, samples, o, [&](const model::LossPoint& p) {
        std::cerr << "  [" << cfg.n_streams << "-stream seed " << seed << "] iter " << p.iteration << " loss "
                  << fmt(p.loss) << " (" << fmt(seconds_since(t0), 3) << " s)\n";
    });
    RunResult r;
    r.final_loss = tr.final_loss;
    r.train = full_image_error(net, train_scenes);
    r.seconds = seconds_since(t0);
    r.validation = full_image_error(net, validation_scenes);
    return r;
}

struct Experiments {
    std::vector<sampler::LabeledScene> train_scenes;
    std::vector<sampler::LabeledScene> validation_scenes;
    std::map<std::uint64_t, RunResult> four;
    std::map<std::uint64_t, RunResult> one;

    Experiments() {
        for (int i = 1; i <= kTrainScenes; ++i) train_scenes.push_back(layered(static_cast<std::uint64_t>(i)));
        for (int i = 1; i <= kValidationScenes; ++i) validation_scenes.push_back(layered(kValidationSeedBase + i));
    }

    const std::map<std::uint64_t, RunResult>& runs(int streams) {
        auto& table = streams == 4 ? four : one;
        if (table.empty()) {
            model::EpinetConfig cfg = model::EpinetConfig::desk();
            if (streams != 4) cfg = model::equal_budget_config(cfg, streams);
            for (std::uint64_t seed : kRunSeeds) table[seed] = overfit_run(cfg, seed, train_scenes, validation_scenes);
        }
        return table;
    }
};

Outcome check_overfit(Experiments& ex) {
    std::vector<double> mae, bp, secs;
    for (const auto& [seed, r] : ex.runs(4)) {
        mae.push_back(r.train.mae);
        bp.push_back(r.train.badpix);
        secs.push_back(r.seconds);
    }
    const double m = median(mae), b = median(bp), worst = *std::max_element(secs.begin(), secs.end());
    const bool pass = m < kOverfitMaeTol && b < kOverfitBadPixPct && worst < kOverfitBudgetS;
    return {pass, "training MAE median " + fmt(m) + " (< 0.1) [" + join(mae) + "], BadPix(0.07) median " + fmt(b) +
                      "% (< 15%) [" + join(bp) + "], slowest run " + fmt(worst, 4) + " s (< 1800 s)"};
}

Outcome check_stream_ablation(Experiments& ex) {
    std::vector<double> four, one;
    for (const auto& [seed, r] : ex.runs(4)) four.push_back(r.validation.mae);
    for (const auto& [seed, r] : ex.runs(1)) one.push_back(r.validation.mae);
    const double m4 = median(four), m1 = median(one);
    const model::EpinetConfig c1 = model::equal_budget_config(model::EpinetConfig::desk(), 1);
    return {m4 <= m1, "validation MAE median 4-stream " + fmt(m4) + " [" + join(four) + "] vs 1-stream " + fmt(m1) +
                          " [" + join(one) + "] (need 4 <= 1); params " +
                          std::to_string(model::closed_form_parameter_count(model::EpinetConfig::desk())) + " vs " +
                          std::to_string(model::closed_form_parameter_count(c1))};
}

// ---------------------------------------------------------------- A5

Outcome check_equivalence() {
    const synth::RenderedScene s =
        synth::render(synth::layered_scene(kEquivalenceSize, kEquivalenceSize, 7), 3, kEquivalenceSize,
                      kEquivalenceSize);
    model::Epinet net(model::EpinetConfig::desk());
    net.init(1);
    // Non-trivial inference statistics.
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<float> u(0.5f, 1.5f);
    for (auto* bn : net.batch_norms())
        for (std::size_t c = 0; c < bn->running_mean.size(); ++c) {
            bn->running_mean[c] = u(rng) - 1.0f;
            bn->running_var[c] = u(rng);
        }
    const lf::StackSet stacks = lf::extract_stacks(s.lightfield);
    const model::InferResult full = model::infer_full(net, stacks, model::Padding::Crop);
    const int expect = kEquivalenceSize - 22;
    bool shape = full.disparity.height() == expect && full.disparity.width() == expect && full.border == 11;
    std::size_t mismatches = 0, checked = 0;
    if (shape) {
        for (int y = 0; y < expect; ++y)
            for (int x = 0; x < expect; ++x) {
                ++checked;
                mismatches += model::infer_patch(net, stacks, y, x) != full.disparity.at(y, x);
            }
    }
    // Shape law on a range of sizes.
    for (auto [h, w] : {std::pair{23, 23}, std::pair{24, 31}, std::pair{50, 23}}) {
        std::vector<nn::Tensor<float>> in(4, nn::Tensor<float>(1, 7, h, w, 0.25f));
        const auto y = net.forward(in, nn::Mode::Infer);
        shape = shape && y.height() == h - 22 && y.width() == w - 22;
    }
    return {shape && mismatches == 0 && checked > 0,
            std::to_string(checked) + " patch predictions compared bitwise to the full-image map, " +
                std::to_string(mismatches) + " differ; output " + std::to_string(full.disparity.height()) + "x" +
                std::to_string(full.disparity.width()) + " for " + std::to_string(kEquivalenceSize) + "x" +
                std::to_string(kEquivalenceSize) + " input, shape law " + (shape ? "holds" : "violated")};
}

// ---------------------------------------------------------------- A6

Outcome check_metrics() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<float> val(-1.0f, 1.0f), noise(-0.1f, 0.1f);
    std::bernoulli_distribution keep(0.7);
    int metric_fail = 0;
    for (int i = 0; i < kMetricCases; ++i) {
        lf::DisparityMap gt(8, 8), pred(8, 8);
        lf::Mask mask(8, 8);
        for (std::size_t k = 0; k < gt.data().size(); ++k) {
            gt.data()[k] = val(rng);
            pred.data()[k] = gt.data()[k] + noise(rng);
            mask.data()[k] = keep(rng);
        }
        mask.data()[0] = 1;
        const lf::Mask* m = i % 2 ? &mask : nullptr;
        bool ok = eval::mse100(pred, gt, m) == epinet::testing::mse100_loop(pred, gt, m);
        for (float thr : eval::kBadPixThresholds)
            ok = ok && eval::badpix(pred, gt, thr, m) == epinet::testing::badpix_loop(pred, gt, thr, m);
        metric_fail += !ok;
    }
    int median_fail = 0;
    std::uniform_int_distribution<int> radius(1, 5);
    std::uniform_real_distribution<float> unit(0.0f, 1.0f);
    for (int i = 0; i < kMedianWindows; ++i) {
        const int r = radius(rng);
        std::vector<float> v(static_cast<std::size_t>((2 * r + 1) * (2 * r + 1)));
        for (float& x : v) x = unit(rng);
        const std::vector<float> w(v.size(), 1.0f);
        median_fail += eval::weighted_median_of(v, w) != epinet::testing::lower_median(v);
    }
    return {metric_fail == 0 && median_fail == 0,
            std::to_string(kMetricCases - metric_fail) + "/" + std::to_string(kMetricCases) +
                " metric cases exact vs brute force, " + std::to_string(kMedianWindows - median_fail) + "/" +
                std::to_string(kMedianWindows) + " uniform-weight medians equal the plain median"};
}

// ---------------------------------------------------------------- A7

int quiet_dispatch(std::vector<std::string> args) {
    args.insert(args.begin(), "epinet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream sink;
    auto* old = std::cout.rdbuf(sink.rdbuf());
    const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old);
    return code;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome check_determinism() {
    epinet::testing::TempDir dir("acceptance_det");
    const std::string scene = (dir / "scene").string();
    if (quiet_dispatch({"synth", "--preset", "layers", "--out", scene, "--height", "48", "--width", "48", "--extent",
                        "3", "--seed", "4"}) != 0) {
        return {false, "synth failed"};
    }
    const std::vector<std::string> outputs{"params.bin", "loss.csv", "config.txt", "pred.pfm", "ens.pfm"};
    std::vector<std::map<std::string, std::string>> runs;
    for (int k = 0; k < 2; ++k) {
        const std::filesystem::path out = dir / ("run" + std::to_string(k));
        if (quiet_dispatch({"train", "--data", scene, "--out", out.string(), "--iters", "60", "--patches", "300",
                            "--seed", "11", "--quiet"}) != 0 ||
            quiet_dispatch({"infer", "--params", (out / "params.bin").string(), "--data", scene, "--out",
                            (out / "pred.pfm").string()}) != 0 ||
            quiet_dispatch({"infer", "--params", (out / "params.bin").string(), "--data", scene, "--out",
                            (out / "ens.pfm").string(), "--ensemble", "--pad", "reflect"}) != 0) {
            return {false, "train/infer run " + std::to_string(k) + " failed"};
        }
        std::map<std::string, std::string> bytes;
        for (const auto& name : outputs) bytes[name] = slurp(out / name);
        runs.push_back(std::move(bytes));
    }
    std::string differ;
    std::size_t total = 0;
    for (const auto& name : outputs) {
        total += runs[0][name].size();
        if (runs[0][name] != runs[1][name] || runs[0][name].empty()) differ += " " + name;
    }
    return {differ.empty(), std::to_string(outputs.size()) + " artifacts (" + std::to_string(total) +
                                " bytes) from two train+infer runs " +
                                (differ.empty() ? "byte-identical" : "differ:" + differ)};
}

// ---------------------------------------------------------------- A8

// Independent layer-by-layer sum: conv weights (in * out * 4) and biases,
// BN gamma and beta.
std::size_t layer_sum(const model::EpinetConfig& c) {
    auto conv = [](std::size_t in, std::size_t out) { return in * out * 4 + out; };
    auto bn = [](std::size_t ch) { return 2 * ch; };
    const std::size_t v = static_cast<std::size_t>(c.views_per_stack());
    const std::size_t sw = static_cast<std::size_t>(c.stream_width), mw = static_cast<std::size_t>(c.merge_width);
    std::size_t stream = 0;
    for (int b = 0; b < c.stream_blocks; ++b) stream += conv(b == 0 ? v : sw, sw) + conv(sw, sw) + bn(sw);
    std::size_t merge = 0;
    for (int b = 0; b + 1 < c.merge_blocks; ++b) merge += conv(mw, mw) + conv(mw, mw) + bn(mw);
    merge += conv(mw, mw) + conv(mw, 1);
    return static_cast<std::size_t>(c.n_streams) * stream + merge;
}

Outcome check_parameters() {
    const model::EpinetConfig full = model::EpinetConfig::full();
    model::Epinet net(full);
    const std::size_t instantiated = net.parameter_count();
    const std::size_t closed = model::closed_form_parameter_count(full);
    const std::size_t independent = layer_sum(full);
    const bool pass = instantiated == closed && closed == independent && closed >= kParamsLow && closed <= kParamsHigh;
    return {pass, "full config " + std::to_string(instantiated) + " parameters (closed form " + std::to_string(closed) +
                      ", layer sum " + std::to_string(independent) + "), range [4.6M, 5.6M]"};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<std::string> only(argv + 1, argv + argc);
    auto want = [&](const std::string& id) { return only.empty() || only.count(id) > 0; };
    Experiments experiments;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"A1", check_gradients},
        {"A2", check_geometry},
        {"A3", [&] { return check_overfit(experiments); }},
        {"A4", [&] { return check_stream_ablation(experiments); }},
        {"A5", check_equivalence},
        {"A6", check_metrics},
        {"A7", check_determinism},
        {"A8", check_parameters},
    };
    int failed = 0, ran = 0;
    for (const auto& [id, fn] : criteria) {
        if (!want(id)) continue;
        ++ran;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !report(id, o).pass;
    }
    std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
