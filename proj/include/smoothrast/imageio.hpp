#pragma once

#include <string>

#include "smoothrast/renderer.hpp"

namespace smoothrast {

// 8-bit grayscale PGM (P5) / PNG, values mapped by v/255; quantization
// on write rounds half to even. Extension picks the format in save_image.
Image load_pgm(const std::string& path);
void save_pgm(const Image& img, const std::string& path);
Image load_png_gray(const std::string& path);
void save_png_gray(const Image& img, const std::string& path);

Image load_image(const std::string& path);   // by extension (.pgm/.png)
void save_image(const Image& img, const std::string& path);

// Raw float64 dump: ASCII header "SRF64 <width> <height>\n", then
// width*height little-endian doubles, row-major.
void save_raw_f64(const Image& img, const std::string& path);
Image load_raw_f64(const std::string& path);

}  // namespace smoothrast
