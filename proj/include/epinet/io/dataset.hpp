#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "epinet/lf/lightfield.hpp"

namespace epinet::io {

struct DatasetEntry {
    std::string scene_name;
    /// (2N+1)^2 view files, row-major by (v, u): index = (v + N) * (2N+1) + (u + N).
    std::vector<std::filesystem::path> views;
    std::optional<std::filesystem::path> gt_disparity;
    std::optional<std::filesystem::path> exclusion_mask;
};

/// Collects a scene directory. Views are `view_{v}_{u}.png` with 0-based grid
/// indices (0..2N) or HCI-style `input_Cam{idx:03}.png` in row-major order.
/// Optional `gt_disparity.pfm` (or `gt_disp_lowres.pfm`) and `exclusion_mask.png`.
DatasetEntry scan_dataset_dir(const std::filesystem::path& dir);

/// Angular extent N with (2N+1)^2 = count; throws DataError for other counts.
int angular_extent_for_count(std::size_t count);

lf::LightField load_lightfield(const DatasetEntry& entry);

/// Loads the exclusion mask (if any) and checks it matches the spatial size.
std::optional<lf::Mask> load_exclusion(const DatasetEntry& entry, int height, int width);
std::optional<lf::DisparityMap> load_ground_truth(const DatasetEntry& entry, int height, int width);

/// Writes a light field as `view_{v}_{u}.png` plus optional ground truth and mask.
DatasetEntry save_dataset(const std::filesystem::path& dir, const std::string& scene_name, const lf::LightField& lf,
                          const lf::DisparityMap* gt, const lf::Mask* exclusion, int bit_depth = 16);

}  // namespace epinet::io
