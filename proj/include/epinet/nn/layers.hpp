#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "epinet/nn/gemm.hpp"
#include "epinet/nn/tensor.hpp"

namespace epinet::nn {

enum class Mode { Train, Infer };

/// Valid 2x2 convolution, stride 1, no padding.
/// y[b,o,i,j] = bias[o] + sum_{c,p,q} w[o,c,p,q] * x[b,c,i+p,j+q]
template <typename T>
class Conv2x2 {
public:
    Conv2x2() = default;
    Conv2x2(int in_channels, int out_channels, std::string name)
        : weight(name + ".weight", {out_channels, in_channels, 2, 2}),
          bias(name + ".bias", {out_channels}),
          in_(in_channels),
          out_(out_channels) {
        if (in_channels < 1 || out_channels < 1) throw ShapeError("convolution needs at least one channel");
    }

    int in_channels() const { return in_; }
    int out_channels() const { return out_; }

    /// He-uniform over fan-in (4 * in_channels); bias zero.
    void init_he_uniform(std::mt19937_64& rng) {
        const double bound = std::sqrt(6.0 / (4.0 * in_));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (T& wv : weight.value) wv = static_cast<T>(dist(rng));
        std::fill(bias.value.begin(), bias.value.end(), T{});
    }

    /// With keep_for_backward the patch matrix is cached for backward().
    Tensor<T> forward(const Tensor<T>& x, bool keep_for_backward) {
        if (x.channels() != in_) {
            throw ShapeError("conv input has " + std::to_string(x.channels()) + " channels, expected " +
                             std::to_string(in_));
        }
        if (x.height() < 2 || x.width() < 2) throw ShapeError("conv input spatial size must be >= 2");
        in_shape_ = {x.batch(), x.channels(), x.height(), x.width()};
        const int ho = x.height() - 1, wo = x.width() - 1;
        const int cols_n = x.batch() * ho * wo;
        std::vector<T> cols = im2col(x);
        Tensor<T> y(x.batch(), out_, ho, wo);
        gemm(out_, cols_n, 4 * in_, weight.value.data(), 4 * in_, cols.data(), cols_n, y.storage().data(), cols_n,
             bias.value.data());
        if (keep_for_backward) {
            cols_ = std::move(cols);
        } else {
            cols_.clear();
        }
        check_finite(y, "conv2x2");
        return y;
    }

    /// Sets weight.grad and bias.grad; returns the input gradient (empty when not requested).
    Tensor<T> backward(const Tensor<T>& gy, bool need_input_grad) {
        const int b = in_shape_[0], h = in_shape_[2], w = in_shape_[3];
        const int ho = h - 1, wo = w - 1;
        const int cols_n = b * ho * wo;
        const int k = 4 * in_;
        if (gy.batch() != b || gy.channels() != out_ || gy.height() != ho || gy.width() != wo) {
            throw ShapeError("conv backward gradient shape " + gy.shape_string() + " does not match forward");
        }
        if (cols_.size() != static_cast<std::size_t>(k) * cols_n) {
            throw ShapeError("conv backward called without a cached forward pass");
        }
        const T* g = gy.storage().data();
        for (int o = 0; o < out_; ++o) {
            T s{};
            const T* row = g + static_cast<std::size_t>(o) * cols_n;
            for (int j = 0; j < cols_n; ++j) s += row[j];
            bias.grad[o] = s;
        }
        // grad_w^T (k x out) = cols (k x cols_n) * gy^T (cols_n x out)
        std::vector<T> gyt(static_cast<std::size_t>(cols_n) * out_);
        transpose_into(out_, cols_n, g, gyt.data());
        std::vector<T> gwt(static_cast<std::size_t>(k) * out_);
        gemm(k, out_, cols_n, cols_.data(), cols_n, gyt.data(), out_, gwt.data(), out_);
        transpose_into(k, out_, gwt.data(), weight.grad.data());

        if (!need_input_grad) return {};
        // grad_cols (k x cols_n) = w^T (k x out) * gy (out x cols_n)
        std::vector<T> wt(static_cast<std::size_t>(k) * out_);
        transpose_into(out_, k, weight.value.data(), wt.data());
        std::vector<T> gcols(static_cast<std::size_t>(k) * cols_n);
        gemm(k, cols_n, out_, wt.data(), out_, g, cols_n, gcols.data(), cols_n);
        return col2im(gcols);
    }

    Parameter<T> weight;
    Parameter<T> bias;

private:
    std::vector<T> im2col(const Tensor<T>& x) const {
        const int b = x.batch(), h = x.height(), w = x.width();
        const int ho = h - 1, wo = w - 1;
        const std::size_t cols_n = static_cast<std::size_t>(b) * ho * wo;
        std::vector<T> cols(static_cast<std::size_t>(4) * in_ * cols_n);
        for (int c = 0; c < in_; ++c) {
            const T* src = x.channel(c);
            for (int p = 0; p < 2; ++p) {
                for (int q = 0; q < 2; ++q) {
                    T* dst = cols.data() + static_cast<std::size_t>(c * 4 + p * 2 + q) * cols_n;
                    for (int bb = 0; bb < b; ++bb)
                        for (int i = 0; i < ho; ++i) {
                            const T* line = src + (static_cast<std::size_t>(bb) * h + i + p) * w + q;
                            std::copy_n(line, wo, dst);
                            dst += wo;
                        }
                }
            }
        }
        return cols;
    }

    Tensor<T> col2im(const std::vector<T>& gcols) const {
        const int b = in_shape_[0], h = in_shape_[2], w = in_shape_[3];
        const int ho = h - 1, wo = w - 1;
        const std::size_t cols_n = static_cast<std::size_t>(b) * ho * wo;
        Tensor<T> gx(b, in_, h, w);
        for (int c = 0; c < in_; ++c) {
            T* dstc = gx.channel(c);
            for (int p = 0; p < 2; ++p) {
                for (int q = 0; q < 2; ++q) {
                    const T* src = gcols.data() + static_cast<std::size_t>(c * 4 + p * 2 + q) * cols_n;
                    for (int bb = 0; bb < b; ++bb)
                        for (int i = 0; i < ho; ++i) {
                            T* line = dstc + (static_cast<std::size_t>(bb) * h + i + p) * w + q;
                            for (int j = 0; j < wo; ++j) line[j] += src[j];
                            src += wo;
                        }
                }
            }
        }
        return gx;
    }

    int in_ = 0;
    int out_ = 0;
    std::array<int, 4> in_shape_{};
    std::vector<T> cols_;
};

template <typename T>
class Relu {
public:
    Tensor<T> forward(const Tensor<T>& x) {
        Tensor<T> y = x;
        active_.assign(x.size(), 0);
        auto yv = y.values();
        for (std::size_t i = 0; i < yv.size(); ++i) {
            if (yv[i] > T{}) {
                active_[i] = 1;
            } else {
                yv[i] = T{};
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy) const {
        if (gy.size() != active_.size()) throw ShapeError("relu backward shape mismatch");
        Tensor<T> gx = gy;
        auto g = gx.values();
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!active_[i]) g[i] = T{};
        return gx;
    }

private:
    std::vector<std::uint8_t> active_;
};

/// Per-channel batch normalization over (batch, y, x).
/// Running statistics: r <- momentum * r + (1 - momentum) * batch statistic
/// (population variance).
template <typename T>
class BatchNorm {
public:
    BatchNorm() = default;
    BatchNorm(int channels, std::string name, double momentum = 0.9, double epsilon = 1e-5)
        : gamma(name + ".gamma", {channels}, T{1}),
          beta(name + ".beta", {channels}, T{0}),
          running_mean(static_cast<std::size_t>(channels), T{0}),
          running_var(static_cast<std::size_t>(channels), T{1}),
          momentum_(momentum),
          epsilon_(epsilon),
          name_(std::move(name)) {}

    int channels() const { return static_cast<int>(gamma.value.size()); }
    const std::string& name() const { return name_; }
    double momentum() const { return momentum_; }
    double epsilon() const { return epsilon_; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode, bool update_running = true) {
        if (x.channels() != channels()) throw ShapeError("batch norm channel mismatch in " + name_);
        Tensor<T> y(x.batch(), x.channels(), x.height(), x.width());
        const std::size_t m = x.channel_size();
        if (mode == Mode::Infer) {
            for (int c = 0; c < channels(); ++c) {
                const T scale = gamma.value[c] / std::sqrt(running_var[c] + static_cast<T>(epsilon_));
                const T shift = beta.value[c] - running_mean[c] * scale;
                const T* src = x.channel(c);
                T* dst = y.channel(c);
                for (std::size_t i = 0; i < m; ++i) dst[i] = std::fma(src[i], scale, shift);
            }
            check_finite(y, "batchnorm");
            return y;
        }
        if (m == 0) throw ShapeError("batch norm on empty batch");
        xhat_ = Tensor<T>(x.batch(), x.channels(), x.height(), x.width());
        inv_std_.assign(static_cast<std::size_t>(channels()), T{});
        for (int c = 0; c < channels(); ++c) {
            const T* src = x.channel(c);
            double sum = 0.0;
            for (std::size_t i = 0; i < m; ++i) sum += src[i];
            const double mean = sum / static_cast<double>(m);
            double sq = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double dv = src[i] - mean;
                sq += dv * dv;
            }
            const double var = sq / static_cast<double>(m);
            const T inv = static_cast<T>(1.0 / std::sqrt(var + epsilon_));
            inv_std_[c] = inv;
            T* xh = xhat_.channel(c);
            T* dst = y.channel(c);
            for (std::size_t i = 0; i < m; ++i) {
                xh[i] = (src[i] - static_cast<T>(mean)) * inv;
                dst[i] = gamma.value[c] * xh[i] + beta.value[c];
            }
            if (update_running) {
                running_mean[c] = static_cast<T>(momentum_ * running_mean[c] + (1.0 - momentum_) * mean);
                running_var[c] = static_cast<T>(momentum_ * running_var[c] + (1.0 - momentum_) * var);
            }
        }
        check_finite(y, "batchnorm");
        return y;
    }

    /// Train-mode backward; sets gamma.grad / beta.grad.
    Tensor<T> backward(const Tensor<T>& gy) {
        if (!gy.same_shape(xhat_)) throw ShapeError("batch norm backward shape mismatch in " + name_);
        Tensor<T> gx(gy.batch(), gy.channels(), gy.height(), gy.width());
        const std::size_t m = gy.channel_size();
        const T inv_m = T{1} / static_cast<T>(m);
        for (int c = 0; c < channels(); ++c) {
            const T* g = gy.channel(c);
            const T* xh = xhat_.channel(c);
            T sum_g{}, sum_gx{};
            for (std::size_t i = 0; i < m; ++i) {
                sum_g += g[i];
                sum_gx += g[i] * xh[i];
            }
            gamma.grad[c] = sum_gx;
            beta.grad[c] = sum_g;
            const T k = gamma.value[c] * inv_std_[c] * inv_m;
            T* dst = gx.channel(c);
            for (std::size_t i = 0; i < m; ++i)
                dst[i] = k * (static_cast<T>(m) * g[i] - sum_g - xh[i] * sum_gx);
        }
        return gx;
    }

    Parameter<T> gamma;
    Parameter<T> beta;
    std::vector<T> running_mean;
    std::vector<T> running_var;

private:
    double momentum_ = 0.9;
    double epsilon_ = 1e-5;
    std::string name_;
    Tensor<T> xhat_;
    std::vector<T> inv_std_;
};

/// Channel concatenation in argument order.
template <typename T>
Tensor<T> concat_channels(std::span<const Tensor<T>> parts) {
    if (parts.empty()) throw ShapeError("concat of zero tensors");
    const Tensor<T>& first = parts.front();
    int channels = 0;
    for (const auto& p : parts) {
        if (p.batch() != first.batch() || p.height() != first.height() || p.width() != first.width()) {
            throw ShapeError("concat operands differ in batch or spatial size");
        }
        channels += p.channels();
    }
    Tensor<T> out(first.batch(), channels, first.height(), first.width());
    auto it = out.storage().begin();
    for (const auto& p : parts) it = std::copy(p.storage().begin(), p.storage().end(), it);
    return out;
}

/// Inverse of concat_channels for gradients.
template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& g, std::span<const int> channel_counts) {
    std::vector<Tensor<T>> out;
    std::size_t offset = 0;
    for (int c : channel_counts) {
        Tensor<T> part(g.batch(), c, g.height(), g.width());
        const std::size_t n = part.size();
        if (offset + n > g.size()) throw ShapeError("split exceeds tensor channels");
        std::copy_n(g.storage().begin() + static_cast<std::ptrdiff_t>(offset), n, part.storage().begin());
        offset += n;
        out.push_back(std::move(part));
    }
    if (offset != g.size()) throw ShapeError("split does not cover all channels");
    return out;
}

template <typename T>
struct LossResult {
    T loss{};
    Tensor<T> grad;
    std::size_t count = 0;
};

/// Mean absolute error over entries with nonzero mask (all entries when mask is empty).
/// Subgradient at zero residual is 0.
template <typename T>
LossResult<T> mae_loss(const Tensor<T>& pred, const Tensor<T>& target, std::span<const std::uint8_t> valid = {}) {
    if (!pred.same_shape(target)) {
        throw ShapeError("mae shapes differ: " + pred.shape_string() + " vs " + target.shape_string());
    }
    if (!valid.empty() && valid.size() != pred.size()) throw ShapeError("mae mask size mismatch");
    LossResult<T> r;
    r.grad = Tensor<T>(pred.batch(), pred.channels(), pred.height(), pred.width());
    auto p = pred.values();
    auto t = target.values();
    for (std::size_t i = 0; i < p.size(); ++i)
        if (valid.empty() || valid[i]) ++r.count;
    if (r.count == 0) throw DataError("mae over an empty valid mask");
    const T inv = T{1} / static_cast<T>(r.count);
    double sum = 0.0;
    auto g = r.grad.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!valid.empty() && !valid[i]) continue;
        const T diff = p[i] - t[i];
        sum += std::abs(static_cast<double>(diff));
        g[i] = diff > T{} ? inv : (diff < T{} ? -inv : T{});
    }
    r.loss = static_cast<T>(sum / static_cast<double>(r.count));
    return r;
}

}  // namespace epinet::nn
