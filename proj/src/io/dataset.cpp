#include "epinet/io/dataset.hpp"

#include <cmath>
#include <map>
#include <regex>

#include "epinet/io/image_io.hpp"

namespace epinet::io {

namespace fs = std::filesystem;

int angular_extent_for_count(std::size_t count) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
    if (count == 0 || side * side != count || side % 2 == 0) {
        throw DataError("view count " + std::to_string(count) + " is not a square of an odd number");
    }
    return static_cast<int>(side / 2);
}

DatasetEntry scan_dataset_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
    static const std::regex grid_re(R"(view_(\d+)_(\d+)\.png)");
    static const std::regex hci_re(R"(input_Cam(\d+)\.png)");
    std::map<std::pair<int, int>, fs::path> grid;
    std::map<int, fs::path> hci;
    DatasetEntry entry;
    entry.scene_name = dir.filename().string();
    if (entry.scene_name.empty()) entry.scene_name = dir.parent_path().filename().string();
    for (const auto& f : fs::directory_iterator(dir)) {
        if (!f.is_regular_file()) continue;
        const std::string name = f.path().filename().string();
        std::smatch m;
        if (std::regex_match(name, m, grid_re)) {
            grid[{std::stoi(m[1]), std::stoi(m[2])}] = f.path();
        } else if (std::regex_match(name, m, hci_re)) {
            hci[std::stoi(m[1])] = f.path();
        } else if (name == "gt_disparity.pfm" || (name == "gt_disp_lowres.pfm" && !entry.gt_disparity)) {
            entry.gt_disparity = f.path();
        } else if (name == "exclusion_mask.png") {
            entry.exclusion_mask = f.path();
        }
    }
    if (!grid.empty() && !hci.empty()) throw DataError(dir.string() + ": mixes view_*_* and input_Cam* files");
    if (!grid.empty()) {
        const int n = angular_extent_for_count(grid.size());
        const int side = 2 * n + 1;
        for (int v = 0; v < side; ++v)
            for (int u = 0; u < side; ++u) {
                auto it = grid.find({v, u});
                if (it == grid.end()) {
                    throw IoError(dir.string() + ": missing view_" + std::to_string(v) + "_" + std::to_string(u) +
                                  ".png");
                }
                entry.views.push_back(it->second);
            }
    } else if (!hci.empty()) {
        angular_extent_for_count(hci.size());
        int expect = 0;
        for (const auto& [idx, path] : hci) {
            if (idx != expect++) throw IoError(dir.string() + ": missing input_Cam" + std::to_string(expect - 1));
            entry.views.push_back(path);
        }
    } else {
        throw IoError(dir.string() + ": no view images found");
    }
    return entry;
}

lf::LightField load_lightfield(const DatasetEntry& entry) {
    const int n = angular_extent_for_count(entry.views.size());
    const int side = 2 * n + 1;
    lf::LightField field;
    for (int v = 0; v < side; ++v) {
        for (int u = 0; u < side; ++u) {
            const fs::path& p = entry.views[static_cast<std::size_t>(v) * side + u];
            if (!fs::exists(p)) throw IoError("missing view file " + p.string());
            lf::Image img = read_png(p);
            if (v == 0 && u == 0) {
                field = lf::LightField(n, img.height(), img.width(), img.channels());
            } else if (img.height() != field.height() || img.width() != field.width() ||
                       img.channels() != field.channels()) {
                throw ShapeError("view " + p.string() + " differs in size from the first view");
            }
            field.set_view(u - n, v - n, std::move(img));
        }
    }
    return field;
}

std::optional<lf::Mask> load_exclusion(const DatasetEntry& entry, int height, int width) {
    if (!entry.exclusion_mask) return std::nullopt;
    lf::Mask m = read_mask(*entry.exclusion_mask);
    if (m.height() != height || m.width() != width) {
        throw ShapeError("exclusion mask " + entry.exclusion_mask->string() + " does not match the view size");
    }
    return m;
}

std::optional<lf::DisparityMap> load_ground_truth(const DatasetEntry& entry, int height, int width) {
    if (!entry.gt_disparity) return std::nullopt;
    lf::DisparityMap d = read_pfm(*entry.gt_disparity);
    if (d.height() != height || d.width() != width) {
        throw ShapeError("ground truth " + entry.gt_disparity->string() + " does not match the view size");
    }
    return d;
}

DatasetEntry save_dataset(const fs::path& dir, const std::string& scene_name, const lf::LightField& lf,
                          const lf::DisparityMap* gt, const lf::Mask* exclusion, int bit_depth) {
    fs::create_directories(dir);
    DatasetEntry entry;
    entry.scene_name = scene_name;
    const int n = lf.angular_extent();
    for (int v = -n; v <= n; ++v)
        for (int u = -n; u <= n; ++u) {
            const fs::path p = dir / ("view_" + std::to_string(v + n) + "_" + std::to_string(u + n) + ".png");
            write_png(p, lf.view(u, v), bit_depth);
            entry.views.push_back(p);
        }
    if (gt) {
        entry.gt_disparity = dir / "gt_disparity.pfm";
        write_pfm(*entry.gt_disparity, *gt);
    }
    if (exclusion) {
        entry.exclusion_mask = dir / "exclusion_mask.png";
        write_mask(*entry.exclusion_mask, *exclusion);
    }
    return entry;
}

}  // namespace epinet::io
