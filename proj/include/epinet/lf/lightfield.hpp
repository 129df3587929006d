#pragma once

#include <array>
#include <string_view>
#include <utility>
#include <vector>

#include "epinet/lf/raster.hpp"

namespace epinet::lf {

/// 4D light field with a square (2N+1)x(2N+1) angular grid.
///
/// Angular coordinates are centered: u runs right (same sense as x), v runs
/// down (same sense as y), and (0, 0) is the center view. A scene point with
/// disparity d seen at x in the center view appears at x + d*u in view (u, v).
class LightField {
public:
    LightField() = default;
    LightField(int angular_extent, int height, int width, int channels);

    int angular_extent() const { return extent_; }
    int angular_size() const { return 2 * extent_ + 1; }
    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }

    bool in_grid(int u, int v) const;

    /// Throws AngularIndexError outside the grid.
    Image& view(int u, int v);
    const Image& view(int u, int v) const;

    /// Replace a view; dimensions must match the field.
    void set_view(int u, int v, Image img);

    /// Checks the type invariants: finite values in [0, 1], uniform view shape.
    void validate() const;

    friend bool operator==(const LightField&, const LightField&) = default;

private:
    std::size_t slot(int u, int v) const;

    int extent_ = 0;
    int height_ = 0;
    int width_ = 0;
    int channels_ = 1;
    std::vector<Image> views_;  // row-major by (v, u)
};

enum class Direction { Horizontal = 0, RightDiagonal = 1, Vertical = 2, LeftDiagonal = 3 };

inline constexpr std::array<Direction, 4> kAllDirections = {
    Direction::Horizontal, Direction::RightDiagonal, Direction::Vertical, Direction::LeftDiagonal};

/// Unit angular step (du, dv) of a direction.
std::pair<int, int> angular_step(Direction d);
std::string_view to_string(Direction d);

/// Views on one angular line through the center, ordered by increasing
/// position t along the direction's unit step; index N is the center view.
struct ViewStack {
    Direction direction = Direction::Horizontal;
    std::vector<Image> views;

    friend bool operator==(const ViewStack&, const ViewStack&) = default;
};

/// The four directional stacks, indexable by Direction.
struct StackSet {
    std::array<ViewStack, 4> stacks;

    ViewStack& operator[](Direction d) { return stacks[static_cast<int>(d)]; }
    const ViewStack& operator[](Direction d) const { return stacks[static_cast<int>(d)]; }

    friend bool operator==(const StackSet&, const StackSet&) = default;
};

/// ITU-R 601 luma. Single-channel input is returned unchanged.
Image to_gray(const Image& img);
LightField to_gray(const LightField& lf);

const Image& extract_view(const LightField& lf, int u, int v);

/// Grayscale stacks along 0, 45, 90 and 135 degrees.
StackSet extract_stacks(const LightField& lf);

enum class Interp { Nearest, Bilinear };

/// Samples with clamp-to-edge at continuous coordinates (pixel centers at integers).
float sample(const Image& img, float x, float y, Interp interp, int channel = 0);

/// Synthesizes view (u, v) from the center view by inverse resampling:
/// out(x, y) = center(x - d(x,y)*u, y - d(x,y)*v), clamp-to-edge outside.
Image warp_center(const Image& center, const DisparityMap& d, int u, int v, Interp interp);

/// Epipolar plane image for a direction. Rows are the stack positions t = -N..N.
///  - Horizontal: fixed row y = index, columns are x.
///  - Vertical: fixed column x = index, columns are y.
///  - RightDiagonal: spatial line x - y = index - (H - 1), columns are x.
///  - LeftDiagonal: spatial line x + y = index, columns are y.
/// Samples off the image read as 0. A point with disparity d traces a line of slope d.
Image extract_epi(const LightField& lf, Direction direction, int index);

/// Residual of the center/view correspondence: for every view (u, v) and every
/// pixel not excluded and at least `margin` px from the border,
/// |view(x + d*u, y + d*v) - center(x, y)| on the grayscale field.
struct RoundTripReport {
    double max_residual = 0.0;
    std::size_t checked_pixels = 0;
};
RoundTripReport round_trip_residual(const LightField& lf, const DisparityMap& d, const Mask* exclude,
                                    Interp interp, int margin);

/// Border margin ceil(max|d| * N) used by the round-trip check.
int round_trip_margin(const DisparityMap& d, int angular_extent);

}  // namespace epinet::lf
