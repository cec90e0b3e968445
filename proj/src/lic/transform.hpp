// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_LIC_TRANSFORM_HPP
#define QUADSIM_LIC_TRANSFORM_HPP

#include <vector>

#include "core/image.hpp"
#include "core/latent.hpp"

namespace quadsim {

// Separable 2-D orthonormal type-II DCT on b x b blocks, one block set per
// color channel, coefficients scaled by 1/quant_step. Channel layout of the
// latent: c = color * b^2 + u * b + v with (u, v) the frequency indices, so
// c_y = 3 * b^2 for RGB input.
class BlockTransform {
 public:
  BlockTransform(int block_size, double quant_step);

  int block_size() const { return b_; }
  double quant_step() const { return delta_; }
  int channels_per_color() const { return b_ * b_; }

  // Forward transform of an already-padded image (dims must be multiples of
  // the block size; the codec pads to 4*b via derive_latent_dims).
  LatentGrid analyze(const ImagePlane& image) const;

  // Inverse transform, +128, clamp to [0,255], round half away from zero.
  ImagePlane synthesize(const LatentGrid& y, int channels) const;

  // max_ij |B B^T - I|, for the orthonormality check.
  double orthonormality_error() const;

 private:
  int b_;
  double delta_;
  std::vector<double> basis_;  // row-major b x b, basis_[k*b+n]
};

}  // namespace quadsim

#endif
