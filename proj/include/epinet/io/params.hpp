#pragma once

#include <filesystem>
#include <string>

#include "epinet/model/network.hpp"

namespace epinet::io {

/// Parameter container layout:
///   8-byte magic "EPINETPC", uint32 format version, uint32 header length,
///   JSON header {"config": {...}, "tensors": [{"name", "shape"}...]},
///   then every tensor's values as little-endian float32 in header order.
/// Tensors are the learnable parameters followed by BN running statistics.
inline constexpr char kParamsMagic[9] = "EPINETPC";
inline constexpr std::uint32_t kParamsVersion = 1;

void save_params(const std::filesystem::path& path, model::Epinet& net);

/// Reads the architecture stored in a container.
model::EpinetConfig read_params_config(const std::filesystem::path& path);

/// Loads values into an existing network. Throws ConfigError naming the first
/// tensor whose shape differs from the network's, ParseError on a truncated
/// or malformed file.
void load_params(const std::filesystem::path& path, model::Epinet& net);

/// Builds a network from the stored config and loads it.
model::Epinet load_model(const std::filesystem::path& path);

}  // namespace epinet::io
