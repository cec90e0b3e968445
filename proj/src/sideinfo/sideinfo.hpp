// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_SIDEINFO_SIDEINFO_HPP
#define QUADSIM_SIDEINFO_SIDEINFO_HPP

#include <cstdint>
#include <vector>

#include "entropy/hyper.hpp"
#include "symbolizer/symbolizer.hpp"

namespace quadsim {

// Lossless rate-map codec. Two modes, the encoder emits the smaller:
//   0x00  delta-filtered (left within a row, up for the first column)
//         indices coded with an order-0 adaptive model under the range
//         coder - wins on smooth maps;
//   0x01  fixed-width bit packing at ceil(log2 n) bits per index - the
//         fallback that keeps the output within the naive bound + one
//         mode byte on incompressible maps.
std::vector<std::uint8_t> encode_rate_map(const RateMap& map);
RateMap decode_rate_map(const std::vector<std::uint8_t>& bytes, int h_y, int w_y,
                        const std::vector<int>& rate_set);

// Everything the receiver needs to parse a frame, as one block:
// rate map, hyper statistics and the power scale.
struct SideBundle {
  RateMap rate_map;
  HyperStats hyper;
  float power_scale = 1.0f;

  std::size_t total_bits = 0;  // of the serialized bundle
  std::size_t map_bits = 0;    // of the coded rate map alone
};

// Bundle wire format (little-endian):
//   "QSID" | u8 version | u16 h_y | u16 w_y | u16 rate_set_size |
//   f32 power_scale | HyperStats | u32 map_len | coded map
std::vector<std::uint8_t> encode_side_bundle(const RateMap& map, const HyperStats& hyper,
                                             float power_scale);
SideBundle decode_side_bundle(const std::vector<std::uint8_t>& bytes,
                              const std::vector<int>& rate_set, double sigma_min);

struct CbrBreakdown {
  double payload_cbr = 0.0;
  double side_cbr = 0.0;
  double total_cbr = 0.0;
};

// CBR bookkeeping: payload = l / (3 H W), side = side_bits / (3 H W C_k).
CbrBreakdown cbr_report(std::size_t symbol_count, double side_bits, int height,
                        int width, double c_k);

}  // namespace quadsim

#endif
