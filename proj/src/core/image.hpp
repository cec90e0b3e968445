// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_CORE_IMAGE_HPP
#define QUADSIM_CORE_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace quadsim {

// 8-bit interleaved image, 1 (gray) or 3 (RGB) channels.
struct ImagePlane {
  int height = 0;
  int width = 0;
  int channels = 3;
  std::vector<std::uint8_t> samples;  // row-major, interleaved

  ImagePlane() = default;
  ImagePlane(int h, int w, int ch, std::uint8_t fill = 0);

  std::uint8_t& at(int y, int x, int c) {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int y, int x, int c) const {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * width;
  }
  bool same_shape(const ImagePlane& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

// Binary PPM (P6) / PGM (P5), maxval 255. Channel count picks the format.
ImagePlane read_pnm(const std::string& path);
void write_pnm(const ImagePlane& img, const std::string& path);

// In-memory variants, used for deterministic byte comparison.
ImagePlane parse_pnm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> serialize_pnm(const ImagePlane& img);

// Extend to (new_h, new_w) by replicating the last row/column.
ImagePlane pad_replicate(const ImagePlane& img, int new_h, int new_w);

// Top-left crop back to (h, w).
ImagePlane crop(const ImagePlane& img, int h, int w);

}  // namespace quadsim

#endif
