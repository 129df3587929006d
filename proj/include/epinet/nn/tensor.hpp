#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "epinet/error.hpp"

namespace epinet::nn {

/// 4D tensor with logical shape (batch, channels, height, width).
///
/// Storage is channel-major: (channel, batch, y, x). Each channel is one
/// contiguous block, so channel concatenation is a plain append and the
/// convolution's matrix product lands directly in tensor order.
template <typename T>
class Tensor {
public:
    Tensor() = default;
    Tensor(int batch, int channels, int height, int width, T fill = T{})
        : n_(batch), c_(channels), h_(height), w_(width) {
        if (batch < 0 || channels < 0 || height < 0 || width < 0) throw ShapeError("negative tensor dimension");
        data_.assign(static_cast<std::size_t>(batch) * channels * height * width, fill);
    }

    int batch() const { return n_; }
    int channels() const { return c_; }
    int height() const { return h_; }
    int width() const { return w_; }
    std::size_t size() const { return data_.size(); }
    std::size_t channel_size() const { return static_cast<std::size_t>(n_) * h_ * w_; }

    T& at(int b, int c, int y, int x) { return data_[index(b, c, y, x)]; }
    const T& at(int b, int c, int y, int x) const { return data_[index(b, c, y, x)]; }

    T* channel(int c) { return data_.data() + c * channel_size(); }
    const T* channel(int c) const { return data_.data() + c * channel_size(); }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }
    std::vector<T>& storage() { return data_; }
    const std::vector<T>& storage() const { return data_; }

    bool same_shape(const Tensor& o) const { return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_; }

    std::string shape_string() const {
        std::ostringstream os;
        os << "(" << n_ << ", " << c_ << ", " << h_ << ", " << w_ << ")";
        return os.str();
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::size_t index(int b, int c, int y, int x) const {
        return ((static_cast<std::size_t>(c) * n_ + b) * h_ + y) * w_ + x;
    }

    int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
    std::vector<T> data_;
};

/// Learnable array with its gradient.
template <typename T>
struct Parameter {
    std::string name;
    std::vector<int> shape;
    std::vector<T> value;
    std::vector<T> grad;

    Parameter() = default;
    Parameter(std::string n, std::vector<int> s, T fill = T{}) : name(std::move(n)), shape(std::move(s)) {
        std::size_t count = 1;
        for (int d : shape) count *= static_cast<std::size_t>(d);
        value.assign(count, fill);
        grad.assign(count, T{});
    }
};

/// Debug-build guard: every op output must stay finite.
template <typename T>
inline void check_finite([[maybe_unused]] const Tensor<T>& t, [[maybe_unused]] const char* where) {
#ifndef NDEBUG
    for (T v : t.values()) {
        if (!std::isfinite(v)) throw DataError(std::string("non-finite value after ") + where);
    }
#endif
}

}  // namespace epinet::nn
