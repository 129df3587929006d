#include "epinet/nn/gradcheck.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "epinet/model/network.hpp"
#include "epinet/nn/layers.hpp"

namespace epinet::nn {
namespace {

using TensorD = Tensor<double>;

struct Rng {
    std::mt19937_64 gen;
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }

    void fill(std::vector<double>& v, double lo, double hi) {
        for (double& x : v) x = uniform(lo, hi);
    }
    /// Values with |x| in [margin, 1], random sign.
    void fill_away_from_zero(std::vector<double>& v, double margin) {
        for (double& x : v) x = (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * uniform(margin, 1.0);
    }
};

double dot(const TensorD& a, const std::vector<double>& r) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += a.storage()[i] * r[i];
    return s;
}

/// Numerical gradient of `loss` with respect to every entry of `x`.
std::vector<double> numeric_grad(std::vector<double>& x, const std::function<double()>& loss) {
    std::vector<double> g(x.size());
    const double h = kFiniteDifferenceStep;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + h;
        const double lp = loss();
        x[i] = keep - h;
        const double lm = loss();
        x[i] = keep;
        g[i] = (lp - lm) / (2.0 * h);
    }
    return g;
}

std::string shape_of(int b, int c, int h, int w) {
    return "(" + std::to_string(b) + "," + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) +
           ")";
}

class Recorder {
public:
    explicit Recorder(GradCheckReport& r) : r_(r) {}

    void add(std::string layer, std::string shape, std::string arg, bool linear, const std::vector<double>& analytic,
             const std::vector<double>& numeric) {
        GradCheckCase c{std::move(layer), std::move(shape), std::move(arg), relative_error(analytic, numeric),
                        linear ? kLinearGradTolerance : kGradTolerance, false};
        c.pass = c.rel_error < c.tolerance;
        double& worst = linear ? r_.max_linear : r_.max_nonlinear;
        worst = std::max(worst, c.rel_error);
        r_.all_pass = r_.all_pass && c.pass;
        r_.cases.push_back(std::move(c));
    }

private:
    GradCheckReport& r_;
};

void check_conv(Rng& rng, Recorder& rec) {
    const int b = rng.uniform_int(1, 3), ci = rng.uniform_int(1, 4), co = rng.uniform_int(1, 4);
    const int h = rng.uniform_int(2, 7), w = rng.uniform_int(2, 7);
    Conv2x2<double> conv(ci, co, "conv");
    rng.fill(conv.weight.value, -1.0, 1.0);
    rng.fill(conv.bias.value, -1.0, 1.0);
    TensorD x(b, ci, h, w);
    rng.fill(x.storage(), -1.0, 1.0);
    std::vector<double> r(static_cast<std::size_t>(b) * co * (h - 1) * (w - 1));
    rng.fill(r, -1.0, 1.0);
    auto loss = [&] { return dot(conv.forward(x, false), r); };

    conv.forward(x, true);
    TensorD gy(b, co, h - 1, w - 1);
    gy.storage() = r;
    const TensorD gx = conv.backward(gy, true);
    const std::vector<double> gw = conv.weight.grad, gb = conv.bias.grad;
    const std::string shape = shape_of(b, ci, h, w) + "->" + std::to_string(co);
    rec.add("conv2x2", shape, "input", true, gx.storage(), numeric_grad(x.storage(), loss));
    rec.add("conv2x2", shape, "weight", true, gw, numeric_grad(conv.weight.value, loss));
    rec.add("conv2x2", shape, "bias", true, gb, numeric_grad(conv.bias.value, loss));
}

void check_concat(Rng& rng, Recorder& rec) {
    const int parts = rng.uniform_int(2, 4), b = rng.uniform_int(1, 3);
    const int h = rng.uniform_int(1, 5), w = rng.uniform_int(1, 5);
    std::vector<TensorD> xs;
    std::vector<int> counts;
    int total = 0;
    for (int p = 0; p < parts; ++p) {
        counts.push_back(rng.uniform_int(1, 3));
        total += counts.back();
        xs.emplace_back(b, counts.back(), h, w);
        rng.fill(xs.back().storage(), -1.0, 1.0);
    }
    std::vector<double> r(static_cast<std::size_t>(b) * total * h * w);
    rng.fill(r, -1.0, 1.0);
    TensorD gy(b, total, h, w);
    gy.storage() = r;
    const auto grads = split_channels<double>(gy, counts);
    for (int p = 0; p < parts; ++p) {
        auto loss = [&] { return dot(concat_channels<double>(xs), r); };
        rec.add("concat", shape_of(b, counts[p], h, w) + " part " + std::to_string(p), "input", true,
                grads[p].storage(), numeric_grad(xs[p].storage(), loss));
    }
}

void check_relu(Rng& rng, Recorder& rec) {
    const int b = rng.uniform_int(1, 3), c = rng.uniform_int(1, 4);
    const int h = rng.uniform_int(1, 6), w = rng.uniform_int(1, 6);
    TensorD x(b, c, h, w);
    rng.fill_away_from_zero(x.storage(), 0.05);
    std::vector<double> r(x.size());
    rng.fill(r, -1.0, 1.0);
    Relu<double> relu;
    auto loss = [&] { return dot(relu.forward(x), r); };
    relu.forward(x);
    TensorD gy(b, c, h, w);
    gy.storage() = r;
    const TensorD gx = relu.backward(gy);
    rec.add("relu", shape_of(b, c, h, w), "input", false, gx.storage(), numeric_grad(x.storage(), loss));
}

void check_batch_norm(Rng& rng, Recorder& rec) {
    const int b = rng.uniform_int(1, 3), c = rng.uniform_int(1, 4);
    const int h = rng.uniform_int(2, 5), w = rng.uniform_int(2, 5);
    BatchNorm<double> bn(c, "bn");
    rng.fill(bn.gamma.value, 0.5, 1.5);
    rng.fill(bn.beta.value, -0.5, 0.5);
    TensorD x(b, c, h, w);
    rng.fill(x.storage(), -1.0, 1.0);
    std::vector<double> r(x.size());
    rng.fill(r, -1.0, 1.0);
    auto loss = [&] { return dot(bn.forward(x, Mode::Train, false), r); };
    bn.forward(x, Mode::Train, false);
    TensorD gy(b, c, h, w);
    gy.storage() = r;
    const TensorD gx = bn.backward(gy);
    const std::vector<double> gg = bn.gamma.grad, gb = bn.beta.grad;
    const std::string shape = shape_of(b, c, h, w);
    rec.add("batchnorm", shape, "input", false, gx.storage(), numeric_grad(x.storage(), loss));
    rec.add("batchnorm", shape, "gamma", false, gg, numeric_grad(bn.gamma.value, loss));
    rec.add("batchnorm", shape, "beta", false, gb, numeric_grad(bn.beta.value, loss));
}

void check_mae(Rng& rng, Recorder& rec) {
    const int b = rng.uniform_int(1, 4), h = rng.uniform_int(1, 4), w = rng.uniform_int(1, 4);
    TensorD target(b, 1, h, w), residual(b, 1, h, w);
    rng.fill(target.storage(), -2.0, 2.0);
    rng.fill_away_from_zero(residual.storage(), 0.05);
    TensorD pred = target;
    for (std::size_t i = 0; i < pred.size(); ++i) pred.storage()[i] += residual.storage()[i];
    std::vector<std::uint8_t> mask(pred.size());
    for (auto& m : mask) m = rng.uniform(0.0, 1.0) < 0.8 ? 1 : 0;
    mask[0] = 1;
    auto loss = [&] { return mae_loss<double>(pred, target, mask).loss; };
    const LossResult<double> res = mae_loss<double>(pred, target, mask);
    rec.add("mae", shape_of(b, 1, h, w), "prediction", false, res.grad.storage(), numeric_grad(pred.storage(), loss));
}

/// Whole-network check on a miniature architecture (BN in train mode).
void check_network(Rng& rng, Recorder& rec) {
    model::EpinetConfig cfg;
    cfg.n_streams = 2;
    cfg.angular_extent = 1;
    cfg.stream_blocks = 1;
    cfg.merge_blocks = 2;
    cfg.stream_width = rng.uniform_int(1, 3);
    cfg.merge_width = 2 * cfg.stream_width;
    cfg.patch = cfg.receptive_field();
    model::EpinetNet<double> net(cfg);
    net.init(rng.gen());
    for (auto* p : net.parameters())
        if (p->name.find(".bias") != std::string::npos) rng.fill(p->value, -0.1, 0.1);
    const int b = rng.uniform_int(2, 3), h = cfg.patch + rng.uniform_int(0, 2), w = cfg.patch + rng.uniform_int(0, 2);
    std::vector<TensorD> inputs;
    for (int s = 0; s < cfg.n_streams; ++s) {
        inputs.emplace_back(b, cfg.views_per_stack(), h, w);
        rng.fill(inputs.back().storage(), 0.0, 1.0);
    }
    const int oh = h - cfg.conv_layers(), ow = w - cfg.conv_layers();
    std::vector<double> r(static_cast<std::size_t>(b) * oh * ow);
    rng.fill(r, -1.0, 1.0);
    auto loss = [&] { return dot(net.forward(inputs, Mode::Train), r); };
    net.forward(inputs, Mode::Train);
    TensorD gy(b, 1, oh, ow);
    gy.storage() = r;
    net.backward(gy);
    std::vector<double> analytic, numeric;
    for (auto* p : net.parameters()) {
        const std::vector<double> g = p->grad;
        const std::vector<double> n = numeric_grad(p->value, loss);
        analytic.insert(analytic.end(), g.begin(), g.end());
        numeric.insert(numeric.end(), n.begin(), n.end());
    }
    rec.add("network", shape_of(b, cfg.views_per_stack(), h, w) + " width " + std::to_string(cfg.stream_width),
            "parameters", false, analytic, numeric);
}

}  // namespace

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ShapeError("gradient vectors differ in length");
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double denom = std::sqrt(std::max(na, nb));
    if (denom < 1e-300) return 0.0;
    return std::sqrt(diff) / denom;
}

GradCheckReport run_gradcheck(int shapes, std::uint64_t seed) {
    GradCheckReport report;
    Recorder rec(report);
    Rng rng{std::mt19937_64(seed)};
    for (int s = 0; s < shapes; ++s) {
        check_conv(rng, rec);
        check_concat(rng, rec);
        check_relu(rng, rec);
        check_batch_norm(rng, rec);
        check_mae(rng, rec);
        if (s % 10 == 0) check_network(rng, rec);
    }
    return report;
}

}  // namespace epinet::nn
