// SPDX-License-Identifier: Apache-2.0

#include "lic/transform.hpp"

#include <cmath>

#include "core/error.hpp"

namespace quadsim {

BlockTransform::BlockTransform(int block_size, double quant_step)
    : b_(block_size), delta_(quant_step) {
  if (b_ < 1) throw Error("transform: block_size must be >= 1");
  if (!(delta_ > 0.0)) throw Error("transform: quant_step must be > 0");
  basis_.resize(static_cast<std::size_t>(b_) * b_);
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < b_; ++k) {
    double ck = std::sqrt((k == 0 ? 1.0 : 2.0) / b_);
    for (int n = 0; n < b_; ++n)
      basis_[static_cast<std::size_t>(k) * b_ + n] =
          ck * std::cos(pi * (2 * n + 1) * k / (2.0 * b_));
  }
}

double BlockTransform::orthonormality_error() const {
  double worst = 0.0;
  for (int r = 0; r < b_; ++r) {
    for (int c = 0; c < b_; ++c) {
      double dot = 0.0;
      for (int n = 0; n < b_; ++n)
        dot += basis_[static_cast<std::size_t>(r) * b_ + n] *
               basis_[static_cast<std::size_t>(c) * b_ + n];
      double err = std::fabs(dot - (r == c ? 1.0 : 0.0));
      if (err > worst) worst = err;
    }
  }
  return worst;
}

LatentGrid BlockTransform::analyze(const ImagePlane& image) const {
  if (image.height % b_ != 0 || image.width % b_ != 0)
    throw Error("analyze: image dims not multiples of block size (pad first)");
  const int h_y = image.height / b_;
  const int w_y = image.width / b_;
  if (h_y % 2 != 0 || w_y % 2 != 0)
    throw Error("analyze: latent dims not even (pad to 4*block_size first)");
  const int cpc = b_ * b_;
  LatentGrid y(h_y, w_y, image.channels * cpc);

  std::vector<double> block(static_cast<std::size_t>(b_) * b_);
  std::vector<double> tmp(static_cast<std::size_t>(b_) * b_);
  for (int bi = 0; bi < h_y; ++bi) {
    for (int bj = 0; bj < w_y; ++bj) {
      for (int ch = 0; ch < image.channels; ++ch) {
        for (int m = 0; m < b_; ++m)
          for (int n = 0; n < b_; ++n)
            block[static_cast<std::size_t>(m) * b_ + n] =
                static_cast<double>(image.at(bi * b_ + m, bj * b_ + n, ch)) - 128.0;
        // T = B * X
        for (int u = 0; u < b_; ++u)
          for (int n = 0; n < b_; ++n) {
            double acc = 0.0;
            for (int m = 0; m < b_; ++m)
              acc += basis_[static_cast<std::size_t>(u) * b_ + m] *
                     block[static_cast<std::size_t>(m) * b_ + n];
            tmp[static_cast<std::size_t>(u) * b_ + n] = acc;
          }
        // C = T * B^T
        for (int u = 0; u < b_; ++u)
          for (int v = 0; v < b_; ++v) {
            double acc = 0.0;
            for (int n = 0; n < b_; ++n)
              acc += tmp[static_cast<std::size_t>(u) * b_ + n] *
                     basis_[static_cast<std::size_t>(v) * b_ + n];
            y.at(bi, bj, ch * cpc + u * b_ + v) = acc / delta_;
          }
      }
    }
  }
  return y;
}

ImagePlane BlockTransform::synthesize(const LatentGrid& y, int channels) const {
  const int cpc = b_ * b_;
  if (y.c_y != channels * cpc) throw Error("synthesize: channel count mismatch");
  ImagePlane img(y.h_y * b_, y.w_y * b_, channels);

  std::vector<double> coef(static_cast<std::size_t>(b_) * b_);
  std::vector<double> tmp(static_cast<std::size_t>(b_) * b_);
  for (int bi = 0; bi < y.h_y; ++bi) {
    for (int bj = 0; bj < y.w_y; ++bj) {
      for (int ch = 0; ch < channels; ++ch) {
        for (int u = 0; u < b_; ++u)
          for (int v = 0; v < b_; ++v)
            coef[static_cast<std::size_t>(u) * b_ + v] =
                y.at(bi, bj, ch * cpc + u * b_ + v) * delta_;
        // T = B^T * C
        for (int m = 0; m < b_; ++m)
          for (int v = 0; v < b_; ++v) {
            double acc = 0.0;
            for (int u = 0; u < b_; ++u)
              acc += basis_[static_cast<std::size_t>(u) * b_ + m] *
                     coef[static_cast<std::size_t>(u) * b_ + v];
            tmp[static_cast<std::size_t>(m) * b_ + v] = acc;
          }
        // X = T * B
        for (int m = 0; m < b_; ++m)
          for (int n = 0; n < b_; ++n) {
            double acc = 0.0;
            for (int v = 0; v < b_; ++v)
              acc += tmp[static_cast<std::size_t>(m) * b_ + v] *
                     basis_[static_cast<std::size_t>(v) * b_ + n];
            double px = std::round(acc + 128.0);
            if (px < 0.0) px = 0.0;
            if (px > 255.0) px = 255.0;
            img.at(bi * b_ + m, bj * b_ + n, ch) = static_cast<std::uint8_t>(px);
          }
      }
    }
  }
  return img;
}

}  // namespace quadsim
