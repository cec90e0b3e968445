// SPDX-License-Identifier: Apache-2.0
//
// Range coder with a 48-bit working range, 16-bit frequency precision and
// byte-wise renormalization (LZMA-style carry handling). The wide range
// keeps the division-truncation loss below 1e-7 bits per symbol even on
// near-deterministic streams. Payload bytes are emitted most-significant
// first and are identical across platforms: tables are built from
// deterministic fixed-point math, the coder itself is integer-only.

#ifndef QUADSIM_RANGECODER_RANGECODER_HPP
#define QUADSIM_RANGECODER_RANGECODER_HPP

#include <cstdint>
#include <vector>

#include "core/error.hpp"

namespace quadsim {

// Frequency table for one residual alphabet: bins r in {-r_max..r_max} plus
// two escape bins (low tail, high tail). Cumulative total is exactly 2^16
// and every bin keeps frequency >= 1 so any symbol stays codable.
class CdfTable {
 public:
  static constexpr std::uint32_t kTotal = 1u << 16;
  static constexpr int kDefaultRMax = 64;

  // Bin frequencies proportional to likelihood(mu + r, mu, sigma); with
  // mean-offset quantization the mean cancels, so the table depends on
  // sigma (and r_max) only.
  CdfTable(double mu, double sigma, double sigma_min, int r_max = kDefaultRMax);

  int r_max() const { return r_max_; }
  int num_symbols() const { return 2 * r_max_ + 3; }
  int esc_low() const { return 2 * r_max_ + 1; }
  int esc_high() const { return 2 * r_max_ + 2; }

  // Residual -> symbol index; escapes for |r| > r_max.
  int symbol_of(std::int64_t residual) const {
    if (residual < -r_max_) return esc_low();
    if (residual > r_max_) return esc_high();
    return static_cast<int>(residual) + r_max_;
  }

  std::uint32_t freq(int sym) const { return cum_[sym + 1] - cum_[sym]; }
  std::uint32_t cum(int sym) const { return cum_[sym]; }

  // Largest symbol with cum(sym) <= f.
  int symbol_from_cum(std::uint32_t f) const;

  // Ideal code length of a residual under this table, escapes included.
  double ideal_bits(std::int64_t residual) const;

 private:
  int r_max_;
  std::vector<std::uint32_t> cum_;  // size num_symbols()+1, cum_.back() == kTotal
};

class RangeEncoder {
 public:
  static constexpr std::uint64_t kRangeMask = (1ull << 48) - 1;
  static constexpr std::uint64_t kRenormBound = 1ull << 40;

  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total);
  void encode_symbol(const CdfTable& table, int sym) {
    encode(table.cum(sym), table.freq(sym), CdfTable::kTotal);
  }
  // Raw byte at exactly 8 bits via a uniform frequency slot.
  void encode_raw_byte(std::uint8_t b) { encode(b * 256u, 256u, 1u << 16); }

  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;  // 48-bit window plus the carry bit
  std::uint64_t range_ = kRangeMask;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(const std::vector<std::uint8_t>& payload);

  // Two-phase decode: fetch the scaled cumulative, map it to a symbol via
  // the table, then commit with that symbol's (cum, freq).
  std::uint32_t decode_freq(std::uint32_t total);
  void decode_update(std::uint32_t cum, std::uint32_t freq);

  int decode_symbol(const CdfTable& table);
  std::uint8_t decode_raw_byte();

 private:
  std::uint8_t next_byte();

  const std::vector<std::uint8_t>* in_;
  std::size_t pos_ = 0;
  std::uint64_t range_ = RangeEncoder::kRangeMask;
  std::uint64_t code_ = 0;
  std::uint64_t r_ = 0;
};

// Sequence interface used by the codecs: per-symbol tables, escape values
// carried as raw 32-bit two's complement.
std::vector<std::uint8_t> encode_residuals(const std::vector<std::int32_t>& residuals,
                                           const std::vector<const CdfTable*>& tables);
std::vector<std::int32_t> decode_residuals(const std::vector<std::uint8_t>& payload,
                                           const std::vector<const CdfTable*>& tables);

// Sum of ideal_bits over a sequence; the tightness bound for the coder.
double ideal_payload_bits(const std::vector<std::int32_t>& residuals,
                          const std::vector<const CdfTable*>& tables);

}  // namespace quadsim

#endif
