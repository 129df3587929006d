#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "epinet/lf/lightfield.hpp"

namespace epinet::augment {

/// One draw of the augmentation product. Geometric members act exactly on
/// (light field, disparity) pairs; photometric members leave disparity alone.
struct AugmentationSpec {
    int shift_u = 0;  // view shift of the center, |shift| <= N_src - N_dst
    int shift_v = 0;
    int rotation = 0;  // degrees: 0, 90, 180, 270
    bool flip = false;
    bool transpose = false;
    int scale_n = 1;  // spatial and disparity scale 1/scale_n, scale_n in 1..4
    float color_gain = 1.0f;
    float gray_mix = 0.0f;
    float gamma = 1.0f;

    std::string to_string() const;
    friend bool operator==(const AugmentationSpec&, const AugmentationSpec&) = default;
};

struct LabeledField {
    lf::LightField lightfield;
    lf::DisparityMap disparity;
};

/// Integer linear map on angular coordinates: (u, v) -> (a u + b v, c u + d v).
struct AngularMap {
    int a = 1, b = 0, c = 0, d = 1;
    std::pair<int, int> apply(int u, int v) const { return {a * u + b * v, c * u + d * v}; }
    AngularMap inverse() const;
};

/// The three elementary symmetries and their angular permutations.
///  rotate (one clockwise quarter turn): spatial (x, y) -> (-y, x),  angular (u, v) -> (-v, u), d unchanged
///  flip:      spatial x -> -x,        angular v -> -v,          d negated
///  transpose: spatial (x, y) -> (y, x), angular (u, v) -> (v, u), d unchanged
enum class Symmetry { Rotate90, Flip, Transpose };
AngularMap angular_map(Symmetry s);

/// Angular crop of size (2 n_dst + 1)^2 centered on view (du, dv). The new
/// center's ground truth must be supplied; disparity values are not altered.
LabeledField view_shift(const lf::LightField& lf, const lf::DisparityMap& shifted_center_gt, int du, int dv,
                        int n_dst);

/// angle in {0, 90, 180, 270}; 90 and 270 require square views.
LabeledField rotate_lf(const lf::LightField& lf, const lf::DisparityMap& d, int angle);
LabeledField flip_lf(const lf::LightField& lf, const lf::DisparityMap& d);
LabeledField transpose_lf(const lf::LightField& lf, const lf::DisparityMap& d);

/// Center-crops to a multiple of n, box-averages every view and the disparity
/// map over n x n blocks and divides disparity by n.
LabeledField scale_lf(const lf::LightField& lf, const lf::DisparityMap& d, int n);

/// Same transform on every view: gain, then mix toward luma, then gamma; clipped to [0, 1].
lf::LightField photometric(const lf::LightField& lf, float gain, float gray_mix, float gamma);

// Geometry applied to auxiliary per-pixel masks (occlusion, reflection).
lf::Mask rotate_mask(const lf::Mask& m, int angle);
/// Block is set when any pixel in it is set.
lf::Mask scale_mask(const lf::Mask& m, int n);

/// The geometric product: view shifts x 4 rotations x 2 flips x 4 scales
/// (288 specs for n_src = 4, n_dst = 3). Photometric members stay at identity.
std::vector<AugmentationSpec> enumerate_product(int n_src = 4, int n_dst = 3);

/// Draws photometric members uniformly: gain [0.5, 2], gray mix [0, 1], gamma [0.8, 1.2].
void sample_photometric(AugmentationSpec& spec, std::mt19937_64& rng);

/// Ground truth of the view at (du, dv), used as the center after view shift.
using CenterTruth = std::function<lf::DisparityMap(int du, int dv)>;

/// Applies a spec in the order: view shift, photometric, rotation, flip, transpose, scale.
LabeledField apply(const AugmentationSpec& spec, const lf::LightField& src, const CenterTruth& truth, int n_dst);

/// Where view t of direction `dst` in the transformed stacks comes from,
/// derived from the angular map (never tabulated by hand).
struct StackSource {
    lf::Direction direction;
    int position;  // t in [-N, N]
};
StackSource stack_source(const AngularMap& map, lf::Direction dst, int t);

/// Stacks of the transformed light field computed from the original stacks:
/// each view is transformed spatially and routed to the stream given by
/// stack_source(). Must equal extract_stacks() of the transformed field.
lf::StackSet rearrange_stacks(const lf::StackSet& original, Symmetry s);

}  // namespace epinet::augment
