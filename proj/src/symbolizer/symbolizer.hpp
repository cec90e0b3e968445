// SPDX-License-Identifier: Apache-2.0
//
// Feature-to-symbol codec of the analog transmission path: rate matching
// of per-unit entropy accumulations onto a predefined rate set, masked
// orthogonal mapping of standardized residuals, complex pairing and
// per-frame power normalization, plus the exact inverse chain.

#ifndef QUADSIM_SYMBOLIZER_SYMBOLIZER_HPP
#define QUADSIM_SYMBOLIZER_SYMBOLIZER_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/latent.hpp"
#include "entropy/hyper.hpp"
#include "symbolizer/linalg.hpp"

namespace quadsim {

// Per-spatial-unit index into the rate set.
struct RateMap {
  int h_y = 0, w_y = 0;
  std::vector<int> rate_set;
  std::vector<std::uint16_t> indices;  // h_y * w_y

  int index_at(int i, int j) const {
    return indices[static_cast<std::size_t>(i) * w_y + j];
  }
  int rate_at(int i, int j) const { return rate_set[index_at(i, j)]; }
};

// Snap each raw k to the nearest rate-set value; ties break to the smaller
// value (bandwidth-conservative).
RateMap rate_match(const std::vector<int>& raw_k, int h_y, int w_y,
                   const std::vector<int>& rate_set);

// One orthogonal C_y x C_y matrix per nonzero rate value, seeded per rate.
// Banks are cached process-wide by (seed, c_y, k) since QR at C_y = 768 is
// the expensive part of a run.
class MappingBank {
 public:
  MappingBank(std::uint64_t master_seed, int c_y, const std::vector<int>& rate_set);

  int c_y() const { return c_y_; }
  const SquareMatrix& matrix_for(int k) const;
  bool has_rate(int k) const { return matrices_.count(k) != 0; }

  void save(const std::string& path) const;
  static MappingBank load(const std::string& path);

 private:
  MappingBank() = default;
  int c_y_ = 0;
  std::map<int, std::shared_ptr<const SquareMatrix>> matrices_;
};

// r = first k entries of W_k * (y - mu_c) / sigma_c.
std::vector<double> map_unit(const std::vector<double>& y_unit, const HyperStats& hyper,
                             int k, const MappingBank& bank);

// Minimum-norm inverse: zero-pad, rotate back, de-standardize.
std::vector<double> unmap_unit(const std::vector<double>& r, const HyperStats& hyper,
                               int k, const MappingBank& bank);

// Complex channel symbols for one latent frame. Unit blocks are laid out
// cell-class-major (classes in step-0 coding order p0,p1,p2,p3), raster
// within a class; consecutive reals pair into (re, im), odd tails pad the
// imaginary part with zero. Symbols are stored power-normalized.
struct SymbolFrame {
  std::vector<std::complex<double>> symbols;
  float power_scale = 1.0f;  // multiplier that was applied; sent on the side link
  RateMap rate_map;

  std::size_t length() const { return symbols.size(); }
};

// Unit visit order shared by pack/unpack: returns (i, j) pairs.
std::vector<std::pair<int, int>> frame_unit_order(int h_y, int w_y);

SymbolFrame pack_frame(const std::vector<std::vector<double>>& mapped_units,
                       const RateMap& rate_map);

// Exact inverse of pack_frame up to the f32 power de-scaling (one rounding
// each way). Throws on any length inconsistency.
std::vector<std::vector<double>> unpack_frame(const std::vector<std::complex<double>>& symbols,
                                              float power_scale, const RateMap& rate_map);

// Total channel uses of a rate map: sum of ceil(k/2).
std::size_t frame_symbol_count(const RateMap& rate_map);

// Symbol dump wire format: u32 count, then f32 interleaved I/Q, LE.
std::vector<std::uint8_t> serialize_symbols(const std::vector<std::complex<double>>& s);
std::vector<std::complex<double>> parse_symbols(const std::vector<std::uint8_t>& bytes);

}  // namespace quadsim

#endif
