#include "epinet/cli/commands.hpp"

#include <CLI11.hpp>

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "epinet/augment/augment.hpp"
#include "epinet/augment/validate.hpp"
#include "epinet/cli/manifest.hpp"
#include "epinet/eval/metrics.hpp"
#include "epinet/eval/weighted_median.hpp"
#include "epinet/io/dataset.hpp"
#include "epinet/io/image_io.hpp"
#include "epinet/io/params.hpp"
#include "epinet/io/run_config.hpp"
#include "epinet/model/infer.hpp"
#include "epinet/model/train.hpp"
#include "epinet/nn/gradcheck.hpp"
#include "epinet/sampler/sampler.hpp"
#include "epinet/synth/scene.hpp"

namespace epinet::cli {
namespace {

namespace fs = std::filesystem;

struct SynthArgs {
    std::string preset;
    std::string out;
    int height = 64;
    int width = 64;
    int extent = 4;
    std::uint64_t seed = 1;
    int bit_depth = 16;
};

struct AugmentArgs {
    bool validate = false;
    int size = 96;
    std::string in;
    std::string preset;
    std::string out;
    std::uint64_t seed = 1;
    int source_extent = 4;
    int extent = 3;
    augment::AugmentationSpec spec;
};

struct TrainArgs {
    std::vector<std::string> data;
    std::string out;
    std::string config;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> iters;
    std::optional<int> batch;
    std::optional<double> lr;
    std::optional<int> patches;
    bool quiet = false;
};

struct InferArgs {
    std::string params;
    std::string data;
    std::string out;
    std::string pad = "crop";
    bool ensemble = false;
    std::string variance;
    bool weighted_median = false;
    int tile = 64;
};

struct EvalArgs {
    std::string pred;
    std::string gt;
    std::string mask;
    int border = 11;
    std::string report;
};

struct GradcheckArgs {
    int shapes = 100;
    std::uint64_t seed = 1;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- synth

int run_synth(const SynthArgs& a) {
    RunManifest manifest("synth");
    manifest.set_seed(a.seed);
    manifest.set_config({{"preset", a.preset},
                         {"height", a.height},
                         {"width", a.width},
                         {"angular_extent", a.extent},
                         {"bit_depth", a.bit_depth}});
    synth::RenderedScene scene;
    {
        PhaseTimer t(manifest, "render");
        scene = synth::render(synth::preset(a.preset, a.height, a.width, a.seed), a.extent, a.height, a.width);
    }
    io::DatasetEntry entry;
    {
        PhaseTimer t(manifest, "write");
        entry = io::save_dataset(a.out, a.preset, scene.lightfield, &scene.disparity, nullptr, a.bit_depth);
    }
    for (const auto& v : entry.views) manifest.add_output(v);
    manifest.add_output(*entry.gt_disparity);
    manifest.write(fs::path(a.out) / "manifest.json");
    std::cout << "wrote " << entry.views.size() << " views of " << a.height << "x" << a.width << " to " << a.out
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- augment

int run_augment_validate(const AugmentArgs& a) {
    const augment::GeometrySuite suite = augment::run_geometry_suite(a.size, a.seed);
    std::cout << "enumerate_product: " << suite.product_size << " specs, " << suite.distinct_specs << " distinct\n";
    for (const auto& e : suite.entries) {
        std::size_t failed = 0;
        for (const auto& c : e.report.checks) failed += c.pass ? 0 : 1;
        std::cout << std::setprecision(3) << e.scene << " " << e.specs << ": " << e.report.checks.size()
                  << " pairs, max nearest residual " << e.report.max_nearest << ", max bilinear residual "
                  << e.report.max_bilinear << ", " << failed << " failed\n";
        for (const auto& c : e.report.checks)
            if (!c.pass) {
                std::cout << "  FAIL " << c.spec.to_string() << " residual " << c.residual << " over "
                          << c.checked_pixels << " px\n";
            }
    }
    std::cout << (suite.all_pass ? "geometry validation passed\n" : "geometry validation FAILED\n");
    return suite.all_pass ? kExitOk : kExitError;
}

int run_augment(const AugmentArgs& a) {
    if (a.validate) return run_augment_validate(a);
    if (a.out.empty()) throw ConfigError("augment needs --out (or --validate)");
    if (a.in.empty() == a.preset.empty()) throw ConfigError("augment needs exactly one of --in and --preset");
    RunManifest manifest("augment");
    manifest.set_seed(a.seed);
    manifest.set_config({{"spec", a.spec.to_string()}, {"angular_extent", a.extent}});
    augment::LabeledField result;
    {
        PhaseTimer t(manifest, "augment");
        if (!a.preset.empty()) {
            const synth::SceneRenderer renderer(synth::preset(a.preset, a.size, a.size, a.seed), a.size, a.size);
            const synth::RenderedScene src =
                synth::render(renderer.spec(), a.source_extent, renderer.height(), renderer.width());
            result = augment::apply(a.spec, src.lightfield,
                                    [&](int du, int dv) { return renderer.disparity(du, dv); }, a.extent);
        } else {
            const io::DatasetEntry entry = io::scan_dataset_dir(a.in);
            manifest.add_input(a.in);
            const lf::LightField field = io::load_lightfield(entry);
            const auto gt = io::load_ground_truth(entry, field.height(), field.width());
            if (!gt) throw DataError(a.in + " has no ground truth disparity");
            result = augment::apply(
                a.spec, field,
                [&](int du, int dv) {
                    if (du != 0 || dv != 0) {
                        throw ConfigError("view shift of a stored dataset needs per-view ground truth; use --preset");
                    }
                    return *gt;
                },
                a.extent);
        }
    }
    const io::DatasetEntry out = io::save_dataset(a.out, "augmented", result.lightfield, &result.disparity, nullptr);
    for (const auto& v : out.views) manifest.add_output(v);
    manifest.add_output(*out.gt_disparity);
    manifest.write(fs::path(a.out) / "manifest.json");
    std::cout << "wrote " << a.spec.to_string() << " to " << a.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- train

sampler::LabeledScene load_training_scene(const std::string& dir, int extent) {
    const io::DatasetEntry entry = io::scan_dataset_dir(dir);
    lf::LightField field = io::load_lightfield(entry);
    auto gt = io::load_ground_truth(entry, field.height(), field.width());
    if (!gt) throw DataError(dir + " has no ground truth disparity");
    auto exclusion = io::load_exclusion(entry, field.height(), field.width());
    if (field.angular_extent() < extent) {
        throw DataError(dir + " has angular extent " + std::to_string(field.angular_extent()) + ", network needs " +
                        std::to_string(extent));
    }
    if (field.angular_extent() > extent) field = augment::view_shift(field, *gt, 0, 0, extent).lightfield;
    return {std::move(field), std::move(*gt), std::move(exclusion)};
}

int run_train(const TrainArgs& a) {
    io::RunConfig cfg;
    if (!a.config.empty()) cfg = io::load_run_config(a.config);
    std::map<std::string, std::string> cli_pairs;
    for (const auto& kv : a.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cli_pairs[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    io::apply_key_values(cfg, cli_pairs);
    if (a.seed) cfg.seed = *a.seed;
    if (a.iters) cfg.iters = *a.iters;
    if (a.batch) cfg.batch = *a.batch;
    if (a.lr) cfg.lr = *a.lr;
    if (a.patches) cfg.patches = *a.patches;
    io::validate(cfg);

    RunManifest manifest("train");
    manifest.set_seed(cfg.seed);
    manifest.set_config(io::run_config_to_json(cfg));
    const fs::path out(a.out);
    fs::create_directories(out);

    std::vector<sampler::LabeledScene> scenes;
    std::vector<model::Sample> samples;
    {
        PhaseTimer t(manifest, "load");
        for (const auto& d : a.data) {
            manifest.add_input(d);
            scenes.push_back(load_training_scene(d, cfg.net.angular_extent));
        }
    }
    {
        PhaseTimer t(manifest, "sample");
        samples = sampler::sample_scenes(scenes, cfg.patches, cfg.seed, cfg.net.patch);
    }
    model::Epinet net(cfg.net);
    net.init(cfg.seed);
    model::TrainOptions opts;
    opts.iterations = cfg.iters;
    opts.batch = cfg.batch;
    opts.lr = cfg.lr;
    opts.lr_final = cfg.lr_final;
    opts.decay_at = cfg.lr_decay_at;
    opts.log_every = cfg.log_every;
    opts.seed = cfg.seed;
    model::TrainResult result;
    {
        PhaseTimer t(manifest, "train");
        const auto t0 = std::chrono::steady_clock::now();
        result = model::train(net, samples, opts, [&](const model::LossPoint& p) {
            if (!a.quiet) {
                std::cout << "iter " << p.iteration << " loss " << std::setprecision(6) << p.loss << " ("
                          << std::setprecision(3) << seconds_since(t0) << " s)\n"
                          << std::flush;
            }
        });
    }
    const fs::path params = out / "params.bin";
    const fs::path curve = out / "loss.csv";
    const fs::path resolved = out / "config.txt";
    io::save_params(params, net);
    {
        std::ofstream f(curve);
        f << "iteration,loss\n";
        for (const auto& p : result.curve) f << p.iteration << "," << std::setprecision(9) << p.loss << "\n";
    }
    {
        std::ofstream f(resolved);
        f << io::to_key_values(cfg);
    }
    manifest.add_output(params);
    manifest.add_output(curve);
    manifest.add_output(resolved);
    manifest.write(out / "manifest.json");
    std::cout << "trained " << cfg.iters << " iterations on " << samples.size() << " patches; final loss "
              << std::setprecision(6) << result.final_loss << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- infer

int run_infer(const InferArgs& a) {
    model::Padding pad;
    if (a.pad == "crop") pad = model::Padding::Crop;
    else if (a.pad == "reflect") pad = model::Padding::Reflect;
    else throw ConfigError("--pad must be crop or reflect");

    RunManifest manifest("infer");
    manifest.add_input(a.params);
    manifest.add_input(a.data);
    model::Epinet net = io::load_model(a.params);
    const io::DatasetEntry entry = io::scan_dataset_dir(a.data);
    lf::LightField field = io::load_lightfield(entry);
    const int extent = net.config().angular_extent;
    if (field.angular_extent() < extent) throw DataError("light field has too few views for the network");
    if (field.angular_extent() > extent) {
        field = augment::view_shift(field, lf::DisparityMap(field.height(), field.width()), 0, 0, extent).lightfield;
    }

    lf::DisparityMap disparity;
    std::optional<lf::DisparityMap> variance;
    int border = 0;
    {
        PhaseTimer t(manifest, "infer");
        if (a.ensemble) {
            auto r = model::infer_ensemble(net, field, model::all_orientations(), pad, a.tile);
            disparity = std::move(r.mean);
            variance = std::move(r.variance);
            border = r.border;
        } else {
            auto r = model::infer_full(net, field, pad, a.tile);
            disparity = std::move(r.disparity);
            border = r.border;
        }
    }
    if (a.weighted_median) {
        PhaseTimer t(manifest, "weighted_median");
        const lf::Image gray = lf::to_gray(field.view(0, 0));
        const lf::Image guide = lf::crop(gray, border, border, disparity.height(), disparity.width());
        disparity = eval::weighted_median(disparity, guide);
    }
    nlohmann::json config = io::config_to_json(net.config());
    config["pad"] = a.pad;
    config["ensemble"] = a.ensemble;
    config["weighted_median"] = a.weighted_median;
    config["tile"] = a.tile;
    config["border"] = border;
    manifest.set_config(config);
    io::write_pfm(a.out, disparity);
    manifest.add_output(a.out);
    if (variance && !a.variance.empty()) {
        io::write_pfm(a.variance, *variance);
        manifest.add_output(a.variance);
    }
    manifest.write(a.out + ".manifest.json");
    std::cout << "wrote " << disparity.height() << "x" << disparity.width() << " disparity (border " << border
              << ") to " << a.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- eval

int run_eval(const EvalArgs& a) {
    const lf::DisparityMap pred = io::read_pfm(a.pred);
    const lf::DisparityMap gt_full = io::read_pfm(a.gt);
    const int dy2 = gt_full.height() - pred.height(), dx2 = gt_full.width() - pred.width();
    if (dy2 < 0 || dx2 < 0 || dy2 % 2 || dx2 % 2 || dy2 != dx2) {
        throw ShapeError("prediction " + std::to_string(pred.height()) + "x" + std::to_string(pred.width()) +
                         " is not a centered crop of the " + std::to_string(gt_full.height()) + "x" +
                         std::to_string(gt_full.width()) + " ground truth");
    }
    const int off = dy2 / 2;
    const lf::DisparityMap gt(lf::crop(gt_full.raster(), off, off, pred.height(), pred.width()));
    // Evaluated pixels: at least `border` px from the ground-truth frame edge
    // and set in the optional evaluation mask.
    const int inner = std::max(0, a.border - off);
    lf::Mask mask = eval::interior_mask(pred.height(), pred.width(), inner);
    if (!a.mask.empty()) {
        const lf::Mask user = io::read_mask(a.mask);
        if (user.height() != gt_full.height() || user.width() != gt_full.width()) {
            throw ShapeError("evaluation mask does not match the ground truth size");
        }
        const lf::Mask cropped = lf::crop(user, off, off, pred.height(), pred.width());
        for (std::size_t i = 0; i < mask.size(); ++i) mask.data()[i] = mask.data()[i] && cropped.data()[i];
    }
    const eval::MetricRow m = eval::evaluate(pred, gt, &mask);
    std::cout << "badpix001,badpix003,badpix007,mse100\n"
              << std::fixed << std::setprecision(6) << m.badpix001 << "," << m.badpix003 << "," << m.badpix007
              << "," << m.mse100 << "\n";
    if (!a.report.empty()) io::write_png(a.report, eval::error_map(pred, gt), 8);
    return kExitOk;
}

// ---------------------------------------------------------------- gradcheck

int run_gradcheck(const GradcheckArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const nn::GradCheckReport r = nn::run_gradcheck(a.shapes, a.seed);
    const double secs = seconds_since(t0);
    for (const auto& c : r.cases)
        if (!c.pass) std::cout << "FAIL " << c.layer << " " << c.shape << " d/d" << c.argument << " " << c.rel_error
                               << "\n";
    std::cout << std::scientific << std::setprecision(3) << "gradcheck: " << r.cases.size() << " cases over "
              << a.shapes << " shapes, max rel err linear " << r.max_linear << ", nonlinear " << r.max_nonlinear
              << std::defaultfloat << ", " << std::setprecision(3) << secs << " s\n"
              << std::scientific << "max rel err: " << std::max(r.max_linear, r.max_nonlinear) << "\n";
    return r.all_pass ? kExitOk : kExitError;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Light field disparity estimation toolkit", "epinet"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Render a synthetic scene with ground truth");
    synth->add_option("--preset", synth_args.preset, "Scene preset")
        ->required()
        ->check(CLI::IsMember(synth::preset_names()));
    synth->add_option("--out", synth_args.out, "Output directory")->required();
    synth->add_option("--height", synth_args.height, "View height")->check(CLI::PositiveNumber);
    synth->add_option("--width", synth_args.width, "View width")->check(CLI::PositiveNumber);
    synth->add_option("--extent", synth_args.extent, "Angular extent N (grid is 2N+1 square)")
        ->check(CLI::Range(0, 8));
    synth->add_option("--seed", synth_args.seed, "Texture and noise seed");
    synth->add_option("--bit-depth", synth_args.bit_depth, "PNG bit depth")->check(CLI::IsMember({8, 16}));

    AugmentArgs aug_args;
    auto* aug = app.add_subcommand("augment", "Apply or validate label-preserving augmentations");
    aug->add_flag("--validate", aug_args.validate, "Check the round-trip invariant over the augmentation product");
    aug->add_option("--size", aug_args.size, "Spatial size for --preset and --validate")->check(CLI::Range(8, 4096));
    aug->add_option("--in", aug_args.in, "Input dataset directory");
    aug->add_option("--preset", aug_args.preset, "Render the source from a preset instead of --in")
        ->check(CLI::IsMember(synth::preset_names()));
    aug->add_option("--source-extent", aug_args.source_extent, "Angular extent of a preset source");
    aug->add_option("--out", aug_args.out, "Output directory");
    aug->add_option("--seed", aug_args.seed, "Preset seed");
    aug->add_option("--extent", aug_args.extent, "Angular extent of the output");
    aug->add_option("--shift-u", aug_args.spec.shift_u, "View shift along u");
    aug->add_option("--shift-v", aug_args.spec.shift_v, "View shift along v");
    aug->add_option("--rotate", aug_args.spec.rotation, "Clockwise rotation in degrees")
        ->check(CLI::IsMember({0, 90, 180, 270}));
    aug->add_flag("--flip", aug_args.spec.flip, "Mirror x (disparity negated)");
    aug->add_flag("--transpose", aug_args.spec.transpose, "Swap x and y");
    aug->add_option("--scale", aug_args.spec.scale_n, "Downscale factor")->check(CLI::Range(1, 4));
    aug->add_option("--gain", aug_args.spec.color_gain, "Intensity gain");
    aug->add_option("--gray-mix", aug_args.spec.gray_mix, "Mix toward luma")->check(CLI::Range(0.0, 1.0));
    aug->add_option("--gamma", aug_args.spec.gamma, "Gamma exponent")->check(CLI::PositiveNumber);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train on patches sampled from datasets");
    train->add_option("--data", train_args.data, "Dataset directory (repeatable)")->required();
    train->add_option("--out", train_args.out, "Output directory")->required();
    train->add_option("--config", train_args.config, "key = value config file")->check(CLI::ExistingFile);
    train->add_option("--set", train_args.overrides, "Override a config key (key=value, repeatable)");
    train->add_option("--seed", train_args.seed, "Seed");
    train->add_option("--iters", train_args.iters, "Iterations");
    train->add_option("--batch", train_args.batch, "Batch size");
    train->add_option("--lr", train_args.lr, "Initial learning rate");
    train->add_option("--patches", train_args.patches, "Number of sampled patches");
    train->add_flag("--quiet", train_args.quiet, "Suppress the loss log");

    InferArgs infer_args;
    auto* infer = app.add_subcommand("infer", "Full-image disparity inference");
    infer->add_option("--params", infer_args.params, "Parameter file")->required()->check(CLI::ExistingFile);
    infer->add_option("--data", infer_args.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    infer->add_option("--out", infer_args.out, "Output PFM")->required();
    infer->add_option("--pad", infer_args.pad, "crop or reflect")->check(CLI::IsMember({"crop", "reflect"}));
    infer->add_flag("--ensemble", infer_args.ensemble, "Average 4 rotations x 2 flips");
    infer->add_option("--variance", infer_args.variance, "Output PFM for the ensemble variance");
    infer->add_flag("--weighted-median", infer_args.weighted_median, "Post-filter with the weighted median");
    infer->add_option("--tile", infer_args.tile, "Output tile size")->check(CLI::PositiveNumber);

    EvalArgs eval_args;
    auto* evalc = app.add_subcommand("eval", "Benchmark metrics of a disparity map");
    evalc->add_option("--pred", eval_args.pred, "Predicted PFM")->required()->check(CLI::ExistingFile);
    evalc->add_option("--gt", eval_args.gt, "Ground truth PFM")->required()->check(CLI::ExistingFile);
    evalc->add_option("--mask", eval_args.mask, "Evaluation mask PNG (nonzero = evaluated)")
        ->check(CLI::ExistingFile);
    evalc->add_option("--border", eval_args.border, "Excluded border width")->check(CLI::NonNegativeNumber);
    evalc->add_option("--report", eval_args.report, "Error map PNG (white = low error)");

    GradcheckArgs grad_args;
    auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
    grad->add_option("--shapes", grad_args.shapes, "Random configurations")->check(CLI::PositiveNumber);
    grad->add_option("--seed", grad_args.seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(synth_args);
        if (aug->parsed()) return run_augment(aug_args);
        if (train->parsed()) return run_train(train_args);
        if (infer->parsed()) return run_infer(infer_args);
        if (evalc->parsed()) return run_eval(eval_args);
        if (grad->parsed()) return run_gradcheck(grad_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::cerr << app.help();
    return kExitUsage;
}

}  // namespace epinet::cli
