#include "epinet/model/config.hpp"

#include <cstdlib>
#include <string>

namespace epinet::model {

std::vector<lf::Direction> EpinetConfig::stream_directions() const {
    using lf::Direction;
    switch (n_streams) {
        case 1: return {Direction::Horizontal};
        case 2: return {Direction::Horizontal, Direction::Vertical};
        case 4: return {Direction::Horizontal, Direction::Vertical, Direction::LeftDiagonal, Direction::RightDiagonal};
        default: throw ConfigError("n_streams must be 1, 2 or 4");
    }
}

void EpinetConfig::validate() const {
    if (n_streams != 1 && n_streams != 2 && n_streams != 4) throw ConfigError("n_streams must be 1, 2 or 4");
    if (angular_extent < 1) throw ConfigError("angular_extent must be >= 1");
    if (stream_blocks < 1 || merge_blocks < 1) throw ConfigError("block counts must be >= 1");
    if (stream_width < 1) throw ConfigError("stream_width must be >= 1");
    if (merge_width != n_streams * stream_width) {
        throw ConfigError("merge_width (" + std::to_string(merge_width) + ") must equal n_streams * stream_width (" +
                          std::to_string(n_streams * stream_width) + ")");
    }
    if (patch != receptive_field()) {
        throw ConfigError("patch size " + std::to_string(patch) + " differs from the receptive field " +
                          std::to_string(receptive_field()));
    }
    if (!(disparity_range > 0.0f)) throw ConfigError("disparity_range must be positive");
}

EpinetConfig EpinetConfig::full() { return EpinetConfig{}; }

EpinetConfig EpinetConfig::desk() {
    EpinetConfig c;
    c.stream_width = 16;
    c.merge_width = 64;
    return c;
}

namespace {

std::size_t conv_params(std::size_t in, std::size_t out) { return out * in * 4 + out; }

}  // namespace

std::size_t closed_form_parameter_count(const EpinetConfig& cfg) {
    const std::size_t views = static_cast<std::size_t>(cfg.views_per_stack());
    const std::size_t sw = static_cast<std::size_t>(cfg.stream_width);
    const std::size_t mw = static_cast<std::size_t>(cfg.merge_width);
    std::size_t stream = 0;
    for (int b = 0; b < cfg.stream_blocks; ++b)
        stream += conv_params(b == 0 ? views : sw, sw) + conv_params(sw, sw) + 2 * sw;
    std::size_t merge = 0;
    for (int b = 0; b + 1 < cfg.merge_blocks; ++b) merge += 2 * conv_params(mw, mw) + 2 * mw;
    merge += conv_params(mw, mw) + conv_params(mw, 1);
    return static_cast<std::size_t>(cfg.n_streams) * stream + merge;
}

EpinetConfig equal_budget_config(const EpinetConfig& reference, int n_streams) {
    const auto target = static_cast<long long>(closed_form_parameter_count(reference));
    EpinetConfig best = reference;
    best.n_streams = n_streams;
    long long best_gap = -1;
    const int max_width = 4 * reference.merge_width + 8;
    for (int w = 1; w <= max_width; ++w) {
        EpinetConfig c = reference;
        c.n_streams = n_streams;
        c.stream_width = w;
        c.merge_width = n_streams * w;
        const long long gap = std::llabs(static_cast<long long>(closed_form_parameter_count(c)) - target);
        if (best_gap < 0 || gap < best_gap) {
            best_gap = gap;
            best = c;
        }
    }
    return best;
}

}  // namespace epinet::model
