#pragma once

#include <filesystem>

#include "epinet/lf/raster.hpp"

namespace epinet::io {

/// Reads an 8- or 16-bit PNG (gray, gray+alpha, RGB, RGBA; alpha dropped,
/// palettes expanded) scaled to [0, 1].
lf::Image read_png(const std::filesystem::path& path);

/// Writes 1- or 3-channel images; values are clipped to [0, 1] and quantized
/// to the requested bit depth (8 or 16).
void write_png(const std::filesystem::path& path, const lf::Image& img, int bit_depth = 16);

/// Binary mask from a PNG: nonzero = set.
lf::Mask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const lf::Mask& mask);

/// Portable float map, single channel ("Pf"). Rows are stored bottom-up; a
/// negative scale marks little-endian data. NaN values are rejected unless
/// allowed.
lf::DisparityMap read_pfm(const std::filesystem::path& path, bool allow_nan = false);
void write_pfm(const std::filesystem::path& path, const lf::DisparityMap& map);

}  // namespace epinet::io
