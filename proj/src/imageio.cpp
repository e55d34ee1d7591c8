#include "smoothrast/imageio.hpp"

#include <png.h>

#include <bit>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace smoothrast {

namespace {

uint8_t quantize(double v) {
    // round half to even, matching std::nearbyint under default rounding
    return static_cast<uint8_t>(std::nearbyint(std::clamp(v, 0.0, 1.0) * 255.0));
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("load_pgm: " + path + " is not a P5 PGM");
    auto next_int = [&]() {
        // skip whitespace and '#' comments
        int c;
        while ((c = in.peek()) != EOF && (std::isspace(c) || c == '#')) {
            if (c == '#') in.ignore(1 << 20, '\n');
            else in.get();
        }
        long v;
        if (!(in >> v)) throw std::runtime_error("load_pgm: malformed header in " + path);
        return v;
    };
    const long w = next_int(), h = next_int(), maxval = next_int();
    if (w <= 0 || h <= 0 || maxval != 255)
        throw std::runtime_error("load_pgm: unsupported dimensions/maxval in " + path);
    in.get();  // single whitespace after maxval
    std::vector<uint8_t> raw(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw std::runtime_error("load_pgm: truncated pixel data in " + path);
    Image img(static_cast<int>(w), static_cast<int>(h));
    for (size_t i = 0; i < raw.size(); ++i) img.intensities[i] = raw[i] / 255.0;
    return img;
}

void save_pgm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_pgm: cannot open " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<uint8_t> raw(img.intensities.size());
    for (size_t i = 0; i < raw.size(); ++i) raw[i] = quantize(img.intensities[i]);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw std::runtime_error("save_pgm: write failed for " + path);
}

Image load_png_gray(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("load_png_gray: cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw std::runtime_error("load_png_gray: libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("load_png_gray: failed to decode " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    std::vector<uint8_t> raw(static_cast<size_t>(w) * h);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = raw.data() + static_cast<size_t>(y) * w;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);
    Image img(w, h);
    for (size_t i = 0; i < raw.size(); ++i) img.intensities[i] = raw[i] / 255.0;
    return img;
}

void save_png_gray(const Image& img, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("save_png_gray: cannot open " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw std::runtime_error("save_png_gray: libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("save_png_gray: failed to encode " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<uint8_t> raw(img.intensities.size());
    for (size_t i = 0; i < raw.size(); ++i) raw[i] = quantize(img.intensities[i]);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, raw.data() + static_cast<size_t>(y) * img.width);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image load_image(const std::string& path) {
    if (ends_with(path, ".pgm")) return load_pgm(path);
    if (ends_with(path, ".png")) return load_png_gray(path);
    if (ends_with(path, ".f64")) return load_raw_f64(path);
    throw std::runtime_error("load_image: unsupported extension for " + path);
}

void save_image(const Image& img, const std::string& path) {
    if (ends_with(path, ".pgm")) return save_pgm(img, path);
    if (ends_with(path, ".png")) return save_png_gray(img, path);
    if (ends_with(path, ".f64")) return save_raw_f64(img, path);
    throw std::runtime_error("save_image: unsupported extension for " + path);
}

void save_raw_f64(const Image& img, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "raw dump assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_raw_f64: cannot open " + path);
    out << "SRF64 " << img.width << " " << img.height << "\n";
    out.write(reinterpret_cast<const char*>(img.intensities.data()),
              static_cast<std::streamsize>(img.intensities.size() * sizeof(double)));
    if (!out) throw std::runtime_error("save_raw_f64: write failed for " + path);
}

Image load_raw_f64(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_raw_f64: cannot open " + path);
    std::string magic;
    int w, h;
    in >> magic >> w >> h;
    if (magic != "SRF64" || w <= 0 || h <= 0)
        throw std::runtime_error("load_raw_f64: bad header in " + path);
    in.get();
    Image img(w, h);
    in.read(reinterpret_cast<char*>(img.intensities.data()),
            static_cast<std::streamsize>(img.intensities.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(img.intensities.size() * sizeof(double)))
        throw std::runtime_error("load_raw_f64: truncated data in " + path);
    return img;
}

}  // namespace smoothrast
