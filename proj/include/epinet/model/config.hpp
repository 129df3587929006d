#pragma once

#include <cstddef>
#include <vector>

#include "epinet/lf/lightfield.hpp"

namespace epinet::model {

/// Architecture of the multi-stream network.
///
/// Each stream sees one directional stack (views_per_stack input channels)
/// and runs `stream_blocks` Conv-ReLU-Conv-BN-ReLU blocks at `stream_width`.
/// Stream features are concatenated and passed through `merge_blocks - 1`
/// such blocks at `merge_width` plus a final Conv-ReLU-Conv block producing
/// one channel. Every conv is a valid 2x2, so the receptive field is
/// 2 * (stream_blocks + merge_blocks) + 1 and must equal `patch`.
struct EpinetConfig {
    int n_streams = 4;
    int angular_extent = 3;
    int stream_blocks = 3;
    int merge_blocks = 8;
    int stream_width = 70;
    int merge_width = 280;
    int patch = 23;
    float disparity_range = 4.0f;
    double bn_momentum = 0.9;
    double bn_epsilon = 1e-5;

    int views_per_stack() const { return 2 * angular_extent + 1; }
    int receptive_field() const { return 2 * (stream_blocks + merge_blocks) + 1; }
    int conv_layers() const { return 2 * (stream_blocks + merge_blocks); }

    /// Streams in concatenation order: 4 -> H, V, LD, RD; 2 -> H, V; 1 -> H.
    std::vector<lf::Direction> stream_directions() const;

    /// Throws ConfigError on a violated invariant.
    void validate() const;

    static EpinetConfig full();
    /// CI-speed profile: stream width 16, merge width 64.
    static EpinetConfig desk();

    friend bool operator==(const EpinetConfig&, const EpinetConfig&) = default;
};

/// Learnable parameter count from layer shapes alone (conv weights and
/// biases, BN gamma and beta; running statistics excluded).
std::size_t closed_form_parameter_count(const EpinetConfig& cfg);

/// Copy of `reference` with `n_streams` streams whose stream width is chosen
/// so the parameter count is as close as possible to the reference count.
EpinetConfig equal_budget_config(const EpinetConfig& reference, int n_streams);

}  // namespace epinet::model
