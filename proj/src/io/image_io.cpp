#include "epinet/io/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace epinet::io {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open " + path.string());
    return f;
}

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
    (void)png;
    throw ParseError(std::string("png: ") + msg);
}

void png_warn(png_structp, png_const_charp) {}

}  // namespace

lf::Image read_png(const std::filesystem::path& path) {
    FilePtr file = open_file(path, "rb");
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw ParseError(path.string() + " is not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    if (!png) throw IoError("png: cannot allocate read struct");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_png(png, info, PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_PACKING, nullptr);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    const int channels = (color == PNG_COLOR_TYPE_GRAY) ? 1 : 3;
    if (depth != 8 && depth != 16) throw ParseError(path.string() + ": unsupported bit depth");
    png_bytepp rows = png_get_rows(png, info);
    lf::Image img(height, width, channels);
    const float maxv = depth == 16 ? 65535.0f : 255.0f;
    for (int y = 0; y < height; ++y) {
        const png_bytep row = rows[y];
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                const std::size_t k = static_cast<std::size_t>(x) * channels + c;
                const unsigned v = depth == 16 ? (static_cast<unsigned>(row[2 * k]) << 8) | row[2 * k + 1] : row[k];
                img.at(y, x, c) = static_cast<float>(v) / maxv;
            }
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, const lf::Image& img, int bit_depth) {
    if (img.channels() != 1 && img.channels() != 3) throw ShapeError("PNG output needs 1 or 3 channels");
    if (bit_depth != 8 && bit_depth != 16) throw ConfigError("PNG bit depth must be 8 or 16");
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    if (!png) throw IoError("png: cannot allocate write struct");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard{&png, &info};
    png_init_io(png, file.get());
    const int w = img.width(), h = img.height(), c = img.channels();
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
                 c == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    const int bytes = bit_depth / 8;
    const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
    std::vector<png_byte> buffer(static_cast<std::size_t>(h) * w * c * bytes);
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) {
        png_bytep row = buffer.data() + static_cast<std::size_t>(y) * w * c * bytes;
        rows[y] = row;
        for (int x = 0; x < w; ++x) {
            for (int ch = 0; ch < c; ++ch) {
                const double v = std::clamp(static_cast<double>(img.at(y, x, ch)), 0.0, 1.0);
                const auto q = static_cast<unsigned>(std::lround(v * maxv));
                const std::size_t k = static_cast<std::size_t>(x) * c + ch;
                if (bytes == 2) {
                    row[2 * k] = static_cast<png_byte>(q >> 8);
                    row[2 * k + 1] = static_cast<png_byte>(q & 0xff);
                } else {
                    row[k] = static_cast<png_byte>(q);
                }
            }
        }
    }
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
}

lf::Mask read_mask(const std::filesystem::path& path) {
    const lf::Image img = read_png(path);
    lf::Mask m(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            bool set = false;
            for (int c = 0; c < img.channels(); ++c) set = set || img.at(y, x, c) != 0.0f;
            m.at(y, x) = set ? 1 : 0;
        }
    return m;
}

void write_mask(const std::filesystem::path& path, const lf::Mask& mask) {
    lf::Image img(mask.height(), mask.width(), 1);
    for (std::size_t i = 0; i < mask.size(); ++i) img.data()[i] = mask.data()[i] ? 1.0f : 0.0f;
    write_png(path, img, 8);
}

namespace {

std::string next_token(std::istream& in) {
    std::string tok;
    char ch = 0;
    while (in.get(ch)) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(ch);
    }
    return tok;
}

}  // namespace

lf::DisparityMap read_pfm(const std::filesystem::path& path, bool allow_nan) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string magic = next_token(in);
    if (magic == "PF") throw ParseError(path.string() + ": color PFM, single-channel expected");
    if (magic != "Pf") throw ParseError(path.string() + ": bad PFM magic '" + magic + "'");
    int width = 0, height = 0;
    double scale = 0.0;
    try {
        width = std::stoi(next_token(in));
        height = std::stoi(next_token(in));
        scale = std::stod(next_token(in));
    } catch (const std::exception&) {
        throw ParseError(path.string() + ": malformed PFM header");
    }
    // next_token consumed exactly one whitespace byte after the scale.
    if (width <= 0 || height <= 0 || scale == 0.0 || !std::isfinite(scale)) {
        throw ParseError(path.string() + ": invalid PFM dimensions or scale");
    }
    const bool little = scale < 0.0;
    lf::DisparityMap map(height, width);
    std::vector<unsigned char> row(static_cast<std::size_t>(width) * 4);
    for (int r = 0; r < height; ++r) {
        if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()))) {
            throw ParseError(path.string() + ": truncated PFM data");
        }
        const int y = height - 1 - r;
        for (int x = 0; x < width; ++x) {
            const unsigned char* b = row.data() + 4 * x;
            const std::uint32_t bits = little ? (std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
                                                 std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24)
                                              : (std::uint32_t(b[3]) | std::uint32_t(b[2]) << 8 |
                                                 std::uint32_t(b[1]) << 16 | std::uint32_t(b[0]) << 24);
            const float v = std::bit_cast<float>(bits);
            if (std::isnan(v) && !allow_nan) throw DataError(path.string() + ": NaN disparity in PFM");
            map.at(y, x) = v;
        }
    }
    return map;
}

void write_pfm(const std::filesystem::path& path, const lf::DisparityMap& map) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "Pf\n" << map.width() << " " << map.height() << "\n-1.0\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(map.width()) * 4);
    for (int y = map.height() - 1; y >= 0; --y) {
        for (int x = 0; x < map.width(); ++x) {
            const auto bits = std::bit_cast<std::uint32_t>(map.at(y, x));
            for (int k = 0; k < 4; ++k) row[4 * x + k] = static_cast<unsigned char>(bits >> (8 * k));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace epinet::io
