#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>

#include "epinet/model/config.hpp"

namespace epinet::io {

/// Settings of a training run. Defaults are the desk profile.
struct RunConfig {
    model::EpinetConfig net = model::EpinetConfig::desk();
    double lr = 1e-5;
    double lr_final = 1e-6;
    double lr_decay_at = 0.8;
    int batch = 16;
    int iters = 5000;
    int patches = 2000;
    int log_every = 100;
    std::uint64_t seed = 1;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Flat `key = value` text, one pair per line, `#` starts a comment.
/// Keys: angular_extent, patch_size, stream_width, merge_width, n_streams,
/// stream_blocks, merge_blocks, disparity_range, bn_momentum, bn_epsilon,
/// lr, lr_final, lr_decay_at, batch, iters, patches, log_every, seed.
/// Unknown keys and unparsable values throw ConfigError.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Applies pairs onto `cfg` in place; later layers override earlier ones, so
/// callers apply file pairs first and command-line pairs second.
void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& pairs);

RunConfig load_run_config(const std::filesystem::path& path);
std::string to_key_values(const RunConfig& cfg);

/// Checks the network invariants and run ranges; throws ConfigError.
void validate(const RunConfig& cfg);

nlohmann::json config_to_json(const model::EpinetConfig& cfg);
model::EpinetConfig config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);

}  // namespace epinet::io
