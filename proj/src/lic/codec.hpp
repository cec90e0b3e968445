// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_LIC_CODEC_HPP
#define QUADSIM_LIC_CODEC_HPP

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "core/config.hpp"
#include "core/image.hpp"
#include "core/latent.hpp"
#include "entropy/hyper.hpp"
#include "entropy/model.hpp"
#include "quadtree/schedule.hpp"
#include "rangecoder/rangecoder.hpp"

namespace quadsim {

// Per-run cache of CDF tables keyed by (sigma grid level, step). The bin
// range tracks the effective sigma (r_max ~ 8*sigma) so tails get escape
// coverage without starving narrow tables through the >=1 frequency floor.
class TableCache {
 public:
  TableCache(const HyperStats& hyper, const ContextParams& params);

  const CdfTable& table_for(int sigma_level, int step);

  // Effective sigma used by both predictor and table at this key.
  double sigma_eff(int sigma_level, int step) const;

  static int r_max_for_sigma(double sigma_eff);

 private:
  const HyperStats* hyper_;
  ContextParams params_;
  std::map<int, std::unique_ptr<CdfTable>> tables_;
};

// Result of running the 4-step schedule over a latent grid.
struct LatentCodeResult {
  std::vector<std::uint8_t> payload;
  double rate_bits = 0.0;          // sum of -log2 p(y_hat) under the coded field
  std::array<double, 4> step_rate_bits{};
  LatentGrid y_hat;                // mean-offset quantized latents
  std::vector<double> unit_bits;   // per (i,j): -log2 p of the *continuous* y
};

// Encode a latent grid along the quadtree schedule. Symbol order is
// step-major, then 2x2 cells in raster order, then channel index.
LatentCodeResult encode_latents(const LatentGrid& y, const HyperStats& hyper,
                                const ContextParams& params);

// Decode; reproduces the encoder's y_hat bit-exactly.
LatentGrid decode_latents(const std::vector<std::uint8_t>& payload, int h_y, int w_y,
                          const HyperStats& hyper, const ContextParams& params);

// Serialized LIC stream. Layout (little-endian, coder payload big-endian):
//   "QLIC" | u8 version | u16 orig_h | u16 orig_w | u8 block_size |
//   u16 c_y | f32 delta | u32 config_digest | HyperStats | u32 len | payload
struct LicEncodeResult {
  std::vector<std::uint8_t> stream;
  double rate_bits = 0.0;
  std::size_t payload_bits = 0;
  std::size_t header_bits = 0;
  LatentGrid y_hat;
};

LicEncodeResult lic_encode(const ImagePlane& image, const SystemConfig& config);

struct LicDecodeResult {
  ImagePlane image;
  LatentGrid y_hat;
};

LicDecodeResult lic_decode(const std::vector<std::uint8_t>& stream,
                           const SystemConfig& config);

}  // namespace quadsim

#endif
