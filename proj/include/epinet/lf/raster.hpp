#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "epinet/error.hpp"

namespace epinet::lf {

/// Planar multi-channel 2D array, stored (channel, y, x) row-major.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int height, int width, int channels = 1, T fill = T{})
        : height_(height), width_(width), channels_(channels) {
        if (height < 0 || width < 0 || channels < 1) {
            throw ShapeError("raster dimensions must be non-negative with at least one channel");
        }
        data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
    }

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    std::size_t plane_size() const { return static_cast<std::size_t>(height_) * width_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& at(int y, int x, int c = 0) { return data_[index(y, x, c)]; }
    const T& at(int y, int x, int c = 0) const { return data_[index(y, x, c)]; }

    bool contains(int y, int x) const { return y >= 0 && y < height_ && x >= 0 && x < width_; }

    std::span<T> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<const T> plane(int c) const { return {data_.data() + c * plane_size(), plane_size()}; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool same_shape(const Raster& o) const {
        return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_;
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t index(int y, int x, int c) const {
        return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 1;
    std::vector<T> data_;
};

using Image = Raster<float>;
/// Binary mask, nonzero = set.
using Mask = Raster<std::uint8_t>;

/// Per-pixel disparity in pixels of shift per unit angular step.
class DisparityMap {
public:
    DisparityMap() = default;
    DisparityMap(int height, int width, float fill = 0.0f) : values_(height, width, 1, fill) {}
    explicit DisparityMap(Image values) : values_(std::move(values)) {
        if (values_.channels() != 1) throw ShapeError("disparity map must be single-channel");
    }

    int height() const { return values_.height(); }
    int width() const { return values_.width(); }
    float& at(int y, int x) { return values_.at(y, x); }
    float at(int y, int x) const { return values_.at(y, x); }
    std::vector<float>& data() { return values_.data(); }
    const std::vector<float>& data() const { return values_.data(); }
    const Image& raster() const { return values_; }
    Image& raster() { return values_; }

    friend bool operator==(const DisparityMap&, const DisparityMap&) = default;

private:
    Image values_;
};

// Spatial transforms shared by views, disparity maps and masks.

/// Clockwise quarter turns on screen (x right, y down): (x, y) -> (-y, x) about the center.
template <typename T>
Raster<T> rotate90(const Raster<T>& src, int quarter_turns) {
    const int q = ((quarter_turns % 4) + 4) % 4;
    if (q == 0) return src;
    const int h = src.height(), w = src.width();
    const bool swap = (q % 2) == 1;
    Raster<T> dst(swap ? w : h, swap ? h : w, src.channels());
    for (int c = 0; c < src.channels(); ++c) {
        for (int y = 0; y < dst.height(); ++y) {
            for (int x = 0; x < dst.width(); ++x) {
                int sy = 0, sx = 0;
                switch (q) {
                    case 1: sy = h - 1 - x; sx = y; break;
                    case 2: sy = h - 1 - y; sx = w - 1 - x; break;
                    default: sy = x; sx = w - 1 - y; break;
                }
                dst.at(y, x, c) = src.at(sy, sx, c);
            }
        }
    }
    return dst;
}

template <typename T>
Raster<T> flip_x(const Raster<T>& src) {
    Raster<T> dst(src.height(), src.width(), src.channels());
    for (int c = 0; c < src.channels(); ++c)
        for (int y = 0; y < src.height(); ++y)
            for (int x = 0; x < src.width(); ++x) dst.at(y, x, c) = src.at(y, src.width() - 1 - x, c);
    return dst;
}

template <typename T>
Raster<T> transpose(const Raster<T>& src) {
    Raster<T> dst(src.width(), src.height(), src.channels());
    for (int c = 0; c < src.channels(); ++c)
        for (int y = 0; y < dst.height(); ++y)
            for (int x = 0; x < dst.width(); ++x) dst.at(y, x, c) = src.at(x, y, c);
    return dst;
}

template <typename T>
Raster<T> crop(const Raster<T>& src, int y0, int x0, int height, int width) {
    if (y0 < 0 || x0 < 0 || height < 0 || width < 0 || y0 + height > src.height() ||
        x0 + width > src.width()) {
        throw RangeError("crop window exceeds raster bounds");
    }
    Raster<T> dst(height, width, src.channels());
    for (int c = 0; c < src.channels(); ++c)
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) dst.at(y, x, c) = src.at(y0 + y, x0 + x, c);
    return dst;
}

/// Mirror padding without edge repetition (dcb|abcd|cba).
template <typename T>
Raster<T> pad_reflect(const Raster<T>& src, int pad) {
    if (pad >= src.height() || pad >= src.width()) {
        throw ShapeError("reflect padding must be smaller than the raster");
    }
    auto reflect = [](int i, int n) {
        if (i < 0) return -i;
        if (i >= n) return 2 * (n - 1) - i;
        return i;
    };
    Raster<T> dst(src.height() + 2 * pad, src.width() + 2 * pad, src.channels());
    for (int c = 0; c < src.channels(); ++c)
        for (int y = 0; y < dst.height(); ++y)
            for (int x = 0; x < dst.width(); ++x)
                dst.at(y, x, c) =
                    src.at(reflect(y - pad, src.height()), reflect(x - pad, src.width()), c);
    return dst;
}

/// Grows set pixels by a square structuring element of the given radius.
Mask dilate(const Mask& m, int radius);

inline DisparityMap rotate90(const DisparityMap& d, int q) { return DisparityMap(rotate90(d.raster(), q)); }
inline DisparityMap flip_x(const DisparityMap& d) { return DisparityMap(flip_x(d.raster())); }
inline DisparityMap transpose(const DisparityMap& d) { return DisparityMap(transpose(d.raster())); }

}  // namespace epinet::lf
