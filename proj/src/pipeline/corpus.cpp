// SPDX-License-Identifier: Apache-2.0

#include "pipeline/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace quadsim {

namespace {

std::uint8_t clamp8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

// Gradient with fine deterministic grain; the grain keeps the codec out of
// the fully transparent regime at small quant steps.
ImagePlane gradient_h(int h, int w, SeededStream& rng) {
  ImagePlane img(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double t = w > 1 ? 255.0 * x / (w - 1) : 0.0;
      double d0 = static_cast<double>(rng.below(7)) - 3.0;
      double d1 = static_cast<double>(rng.below(7)) - 3.0;
      double d2 = static_cast<double>(rng.below(7)) - 3.0;
      img.at(y, x, 0) = clamp8(t + d0);
      img.at(y, x, 1) = clamp8(255.0 - t + d1);
      img.at(y, x, 2) = clamp8(0.5 * t + 64.0 + d2);
    }
  return img;
}

ImagePlane gradient_diag(int h, int w) {
  ImagePlane img(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double t = 255.0 * (x + y) / (w + h - 2);
      img.at(y, x, 0) = clamp8(t);
      img.at(y, x, 1) = clamp8(t);
      img.at(y, x, 2) = clamp8(255.0 - t);
    }
  return img;
}

ImagePlane noise_uniform(int h, int w, SeededStream& rng) {
  ImagePlane img(h, w, 3);
  for (auto& s : img.samples) s = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

ImagePlane noise_gauss(int h, int w, SeededStream& rng) {
  ImagePlane img(h, w, 3);
  for (auto& s : img.samples) s = clamp8(128.0 + 32.0 * rng.normal());
  return img;
}

ImagePlane checker(int h, int w, int cell) {
  ImagePlane img(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool on = ((y / cell) + (x / cell)) % 2 == 0;
      std::uint8_t v = on ? 220 : 30;
      img.at(y, x, 0) = v;
      img.at(y, x, 1) = v;
      img.at(y, x, 2) = on ? 60 : 190;
    }
  return img;
}

ImagePlane checker_gradient(int h, int w) {
  ImagePlane img(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool on = ((y / 12) + (x / 12)) % 2 == 0;
      double t = 255.0 * y / (h - 1);
      double v = on ? 0.75 * t + 48.0 : 0.35 * t + 16.0;
      img.at(y, x, 0) = clamp8(v);
      img.at(y, x, 1) = clamp8(0.8 * v + 20.0);
      img.at(y, x, 2) = clamp8(255.0 - v);
    }
  return img;
}

// Separable AR(2)-flavored smoothing of white noise: close enough to the
// 1/f^2 statistics of natural images for entropy-model exercises.
ImagePlane ar2_field(int h, int w, SeededStream& rng) {
  std::vector<double> f(static_cast<std::size_t>(h) * w);
  for (auto& v : f) v = rng.normal();
  auto idx = [&](int y, int x) { return static_cast<std::size_t>(y) * w + x; };
  // two causal sweeps with AR(2) feedback, then normalize
  for (int y = 0; y < h; ++y)
    for (int x = 2; x < w; ++x)
      f[idx(y, x)] += 1.6 * f[idx(y, x - 1)] - 0.68 * f[idx(y, x - 2)];
  for (int x = 0; x < w; ++x)
    for (int y = 2; y < h; ++y)
      f[idx(y, x)] += 1.6 * f[idx(y - 1, x)] - 0.68 * f[idx(y - 2, x)];
  double mean = 0.0, var = 0.0;
  for (double v : f) mean += v;
  mean /= static_cast<double>(f.size());
  for (double v : f) var += (v - mean) * (v - mean);
  var /= static_cast<double>(f.size());
  double scale = var > 0.0 ? 48.0 / std::sqrt(var) : 1.0;

  ImagePlane img(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = 128.0 + scale * (f[idx(y, x)] - mean);
      img.at(y, x, 0) = clamp8(v);
      img.at(y, x, 1) = clamp8(0.9 * (v - 128.0) + 120.0);
      img.at(y, x, 2) = clamp8(0.7 * (v - 128.0) + 136.0);
    }
  return img;
}

ImagePlane rings(int h, int w) {
  ImagePlane img(h, w, 3);
  double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double r = std::sqrt((y - cy) * (y - cy) + (x - cx) * (x - cx));
      double v = 128.0 + 110.0 * std::cos(r * 0.35);
      img.at(y, x, 0) = clamp8(v);
      img.at(y, x, 1) = clamp8(255.0 - v);
      img.at(y, x, 2) = clamp8(0.5 * v + 40.0);
    }
  return img;
}

}  // namespace

std::vector<std::string> corpus_image_names() {
  return {"gradient_h",  "gradient_diag", "noise_uniform", "noise_gauss",
          "checker",     "checker_grad",  "ar2_smooth",    "rings"};
}

ImagePlane make_corpus_image(const std::string& name, std::uint64_t seed) {
  SeededStream rng(seed, "corpus/" + name);
  if (name == "gradient_h") return gradient_h(128, 128, rng);
  if (name == "gradient_diag") return gradient_diag(150, 100);  // exercises padding
  if (name == "noise_uniform") return noise_uniform(128, 128, rng);
  if (name == "noise_gauss") return noise_gauss(128, 128, rng);
  // 12-px cells do not divide the 16-px analysis blocks, so block content
  // varies across the grid
  if (name == "checker") return checker(128, 128, 12);
  if (name == "checker_grad") return checker_gradient(128, 128);
  if (name == "ar2_smooth") return ar2_field(128, 128, rng);
  if (name == "rings") return rings(132, 76);  // exercises padding
  throw Error("unknown corpus image \"" + name + "\"");
}

}  // namespace quadsim
