// SPDX-License-Identifier: Apache-2.0

#include "core/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace quadsim {

ImagePlane::ImagePlane(int h, int w, int ch, std::uint8_t fill)
    : height(h), width(w), channels(ch),
      samples(static_cast<std::size_t>(h) * w * ch, fill) {
  if (h < 0 || w < 0 || (ch != 1 && ch != 3)) throw Error("ImagePlane: bad shape");
}

namespace {

// PNM header token reader: skips whitespace and '#' comments.
int next_pnm_int(const std::vector<std::uint8_t>& b, std::size_t& pos) {
  while (pos < b.size()) {
    if (std::isspace(b[pos])) {
      ++pos;
    } else if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (pos >= b.size() || !std::isdigit(b[pos])) throw FormatError("pnm: bad header");
  int v = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + (b[pos] - '0');
    ++pos;
  }
  return v;
}

}  // namespace

ImagePlane parse_pnm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("pnm: not a PNM file");
  int channels;
  if (bytes[1] == '6') {
    channels = 3;
  } else if (bytes[1] == '5') {
    channels = 1;
  } else {
    throw FormatError("pnm: only binary P5/P6 supported");
  }
  std::size_t pos = 2;
  int w = next_pnm_int(bytes, pos);
  int h = next_pnm_int(bytes, pos);
  int maxval = next_pnm_int(bytes, pos);
  if (maxval != 255) throw FormatError("pnm: only maxval 255 supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError("pnm: bad header");
  ++pos;  // single whitespace after maxval
  ImagePlane img(h, w, channels);
  if (bytes.size() - pos < img.samples.size()) throw FormatError("pnm: truncated pixel data");
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), img.samples.size(),
              img.samples.begin());
  return img;
}

std::vector<std::uint8_t> serialize_pnm(const ImagePlane& img) {
  if (img.channels != 1 && img.channels != 3) throw Error("pnm: bad channel count");
  std::ostringstream head;
  head << (img.channels == 3 ? "P6" : "P5") << "\n"
       << img.width << " " << img.height << "\n255\n";
  std::string h = head.str();
  std::vector<std::uint8_t> out(h.begin(), h.end());
  out.insert(out.end(), img.samples.begin(), img.samples.end());
  return out;
}

ImagePlane read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_pnm(bytes);
}

void write_pnm(const ImagePlane& img, const std::string& path) {
  auto bytes = serialize_pnm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

ImagePlane pad_replicate(const ImagePlane& img, int new_h, int new_w) {
  if (new_h < img.height || new_w < img.width) throw Error("pad_replicate: shrinking");
  if (img.height == 0 || img.width == 0) throw Error("pad_replicate: empty image");
  ImagePlane out(new_h, new_w, img.channels);
  for (int y = 0; y < new_h; ++y) {
    int sy = std::min(y, img.height - 1);
    for (int x = 0; x < new_w; ++x) {
      int sx = std::min(x, img.width - 1);
      for (int c = 0; c < img.channels; ++c) out.at(y, x, c) = img.at(sy, sx, c);
    }
  }
  return out;
}

ImagePlane crop(const ImagePlane& img, int h, int w) {
  if (h > img.height || w > img.width) throw Error("crop: growing");
  ImagePlane out(h, w, img.channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < img.channels; ++c) out.at(y, x, c) = img.at(y, x, c);
  return out;
}

}  // namespace quadsim
