#include "epinet/lf/lightfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace epinet::lf {

LightField::LightField(int angular_extent, int height, int width, int channels)
    : extent_(angular_extent), height_(height), width_(width), channels_(channels) {
    if (angular_extent < 1) throw AngularIndexError("angular extent N must be >= 1");
    if (height < 1 || width < 1) throw ShapeError("light field views must be non-empty");
    if (channels != 1 && channels != 3) throw ShapeError("light field must have 1 or 3 channels");
    const int n = angular_size();
    views_.assign(static_cast<std::size_t>(n) * n, Image(height, width, channels));
}

bool LightField::in_grid(int u, int v) const {
    return std::abs(u) <= extent_ && std::abs(v) <= extent_;
}

std::size_t LightField::slot(int u, int v) const {
    if (!in_grid(u, v)) {
        std::ostringstream os;
        os << "angular index (" << u << ", " << v << ") outside [-" << extent_ << ", " << extent_ << "]";
        throw AngularIndexError(os.str());
    }
    return static_cast<std::size_t>(v + extent_) * angular_size() + (u + extent_);
}

Image& LightField::view(int u, int v) { return views_[slot(u, v)]; }
const Image& LightField::view(int u, int v) const { return views_[slot(u, v)]; }

void LightField::set_view(int u, int v, Image img) {
    if (img.height() != height_ || img.width() != width_ || img.channels() != channels_) {
        throw ShapeError("view dimensions do not match the light field");
    }
    views_[slot(u, v)] = std::move(img);
}

void LightField::validate() const {
    for (const auto& view : views_) {
        if (view.height() != height_ || view.width() != width_ || view.channels() != channels_) {
            throw ShapeError("light field views differ in shape");
        }
        for (float p : view.data()) {
            if (!std::isfinite(p) || p < 0.0f || p > 1.0f) {
                throw DataError("light field intensity outside [0, 1] or non-finite");
            }
        }
    }
}

std::pair<int, int> angular_step(Direction d) {
    switch (d) {
        case Direction::Horizontal: return {1, 0};
        case Direction::RightDiagonal: return {1, 1};
        case Direction::Vertical: return {0, 1};
        case Direction::LeftDiagonal: return {-1, 1};
    }
    return {0, 0};
}

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::Horizontal: return "horizontal";
        case Direction::RightDiagonal: return "right-diagonal";
        case Direction::Vertical: return "vertical";
        case Direction::LeftDiagonal: return "left-diagonal";
    }
    return "?";
}

Image to_gray(const Image& img) {
    if (img.channels() == 1) return img;
    if (img.channels() != 3) throw ShapeError("grayscale conversion expects 1 or 3 channels");
    Image out(img.height(), img.width(), 1);
    auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
    auto o = out.plane(0);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
    return out;
}

LightField to_gray(const LightField& lf) {
    if (lf.channels() == 1) return lf;
    const int n = lf.angular_extent();
    LightField out(n, lf.height(), lf.width(), 1);
    for (int v = -n; v <= n; ++v)
        for (int u = -n; u <= n; ++u) out.set_view(u, v, to_gray(lf.view(u, v)));
    return out;
}

const Image& extract_view(const LightField& lf, int u, int v) { return lf.view(u, v); }

StackSet extract_stacks(const LightField& lf) {
    const int n = lf.angular_extent();
    StackSet set;
    for (Direction dir : kAllDirections) {
        auto [du, dv] = angular_step(dir);
        ViewStack& stack = set[dir];
        stack.direction = dir;
        stack.views.reserve(2 * n + 1);
        for (int t = -n; t <= n; ++t) stack.views.push_back(to_gray(lf.view(t * du, t * dv)));
    }
    return set;
}

float sample(const Image& img, float x, float y, Interp interp, int channel) {
    const int h = img.height(), w = img.width();
    auto clampi = [](int i, int n) { return std::clamp(i, 0, n - 1); };
    if (interp == Interp::Nearest) {
        const int xi = clampi(static_cast<int>(std::lround(x)), w);
        const int yi = clampi(static_cast<int>(std::lround(y)), h);
        return img.at(yi, xi, channel);
    }
    const float fx = std::floor(x), fy = std::floor(y);
    const float ax = x - fx, ay = y - fy;
    const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
    const float p00 = img.at(clampi(y0, h), clampi(x0, w), channel);
    const float p01 = img.at(clampi(y0, h), clampi(x0 + 1, w), channel);
    const float p10 = img.at(clampi(y0 + 1, h), clampi(x0, w), channel);
    const float p11 = img.at(clampi(y0 + 1, h), clampi(x0 + 1, w), channel);
    const float top = p00 + ax * (p01 - p00);
    const float bottom = p10 + ax * (p11 - p10);
    return top + ay * (bottom - top);
}

Image warp_center(const Image& center, const DisparityMap& d, int u, int v, Interp interp) {
    if (d.height() != center.height() || d.width() != center.width()) {
        throw ShapeError("disparity map does not match the image");
    }
    for (float x : d.data()) {
        if (!std::isfinite(x)) throw DataError("non-finite disparity");
    }
    Image out(center.height(), center.width(), center.channels());
    for (int c = 0; c < center.channels(); ++c) {
        for (int y = 0; y < center.height(); ++y) {
            for (int x = 0; x < center.width(); ++x) {
                const float disp = d.at(y, x);
                out.at(y, x, c) = sample(center, static_cast<float>(x) - disp * static_cast<float>(u),
                                         static_cast<float>(y) - disp * static_cast<float>(v), interp, c);
            }
        }
    }
    return out;
}

Image extract_epi(const LightField& lf, Direction direction, int index) {
    const int n = lf.angular_extent();
    const int h = lf.height(), w = lf.width();
    int limit = 0, length = 0;
    switch (direction) {
        case Direction::Horizontal: limit = h; length = w; break;
        case Direction::Vertical: limit = w; length = h; break;
        case Direction::RightDiagonal: limit = h + w - 1; length = w; break;
        case Direction::LeftDiagonal: limit = h + w - 1; length = h; break;
    }
    if (index < 0 || index >= limit) {
        std::ostringstream os;
        os << "EPI index " << index << " outside [0, " << limit << ")";
        throw RangeError(os.str());
    }
    auto [du, dv] = angular_step(direction);
    Image epi(2 * n + 1, length, 1);
    for (int t = -n; t <= n; ++t) {
        const Image view = to_gray(lf.view(t * du, t * dv));
        for (int s = 0; s < length; ++s) {
            int x = 0, y = 0;
            switch (direction) {
                case Direction::Horizontal: x = s; y = index; break;
                case Direction::Vertical: x = index; y = s; break;
                case Direction::RightDiagonal: x = s; y = s - (index - (h - 1)); break;
                case Direction::LeftDiagonal: y = s; x = index - s; break;
            }
            epi.at(t + n, s) = view.contains(y, x) ? view.at(y, x) : 0.0f;
        }
    }
    return epi;
}

int round_trip_margin(const DisparityMap& d, int angular_extent) {
    float m = 0.0f;
    for (float x : d.data()) m = std::max(m, std::abs(x));
    return static_cast<int>(std::ceil(static_cast<double>(m) * angular_extent - 1e-9));
}

RoundTripReport round_trip_residual(const LightField& lf, const DisparityMap& d, const Mask* exclude,
                                    Interp interp, int margin) {
    if (d.height() != lf.height() || d.width() != lf.width()) {
        throw ShapeError("disparity map does not match the light field");
    }
    if (exclude && (exclude->height() != lf.height() || exclude->width() != lf.width())) {
        throw ShapeError("exclusion mask does not match the light field");
    }
    const LightField gray = to_gray(lf);
    const Image& center = gray.view(0, 0);
    const int n = lf.angular_extent();
    RoundTripReport report;
    for (int y = margin; y < lf.height() - margin; ++y) {
        for (int x = margin; x < lf.width() - margin; ++x) {
            if (exclude && exclude->at(y, x)) continue;
            ++report.checked_pixels;
            const float disp = d.at(y, x);
            for (int v = -n; v <= n; ++v) {
                for (int u = -n; u <= n; ++u) {
                    const float s = sample(gray.view(u, v), static_cast<float>(x) + disp * static_cast<float>(u),
                                           static_cast<float>(y) + disp * static_cast<float>(v), interp);
                    report.max_residual =
                        std::max(report.max_residual, static_cast<double>(std::abs(s - center.at(y, x))));
                }
            }
        }
    }
    return report;
}

}  // namespace epinet::lf
