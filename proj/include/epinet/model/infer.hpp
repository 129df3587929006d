#pragma once

#include <vector>

#include "epinet/lf/lightfield.hpp"
#include "epinet/model/network.hpp"

namespace epinet::model {

enum class Padding { Crop, Reflect };

struct InferResult {
    lf::DisparityMap disparity;
    /// Offset of disparity(0, 0) in the input views. In crop mode the output
    /// covers the input minus an undefined border of this width; reflect mode
    /// covers the full frame and reports 0.
    int border = 0;
};

/// Full-image inference on a light field whose angular extent matches the
/// network. The output is computed in tiles of at most `tile` x `tile`
/// positions; results do not depend on the tile size.
InferResult infer_full(Epinet& net, const lf::LightField& lf, Padding pad = Padding::Crop, int tile = 64);
InferResult infer_full(Epinet& net, const lf::StackSet& stacks, Padding pad = Padding::Crop, int tile = 64);

/// Prediction for the single patch whose top-left corner is (y0, x0).
float infer_patch(Epinet& net, const lf::StackSet& stacks, int y0, int x0);

/// One orientation variant: flip (x-mirror, disparity negated) then a
/// clockwise rotation by `quarter_turns`.
struct Orientation {
    int quarter_turns = 0;
    bool flip = false;

    friend bool operator==(const Orientation&, const Orientation&) = default;
};

/// 4 rotations x flip off/on.
std::vector<Orientation> all_orientations();

struct EnsembleResult {
    lf::DisparityMap mean;
    /// Population variance across variants, per pixel.
    lf::DisparityMap variance;
    int border = 0;
};

/// Infers every variant on the transformed field, maps each prediction back
/// to the original frame (with the disparity sign rule for flips) and
/// averages. Requires square views.
EnsembleResult infer_ensemble(Epinet& net, const lf::LightField& lf, const std::vector<Orientation>& variants,
                              Padding pad = Padding::Crop, int tile = 64);

/// Maps a disparity map predicted on a transformed field back to the original frame.
lf::DisparityMap undo_orientation(const lf::DisparityMap& d, const Orientation& o);

}  // namespace epinet::model
