// SPDX-License-Identifier: Apache-2.0

#include "rangecoder/rangecoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/detmath.hpp"
#include "entropy/model.hpp"

namespace quadsim {

namespace {
constexpr std::int64_t kWeightScale = 1ll << 30;
}  // namespace

CdfTable::CdfTable(double mu, double sigma, double sigma_min, int r_max)
    : r_max_(r_max) {
  if (sigma < sigma_min) throw Error("CdfTable: sigma below sigma_min");
  if (r_max < 1) throw Error("CdfTable: r_max must be >= 1");
  (void)mu;  // mean-offset residuals: the fractional part cancels

  const int nsym = num_symbols();
  // Fixed-point weights from the deterministic Phi; everything after this
  // loop is integer arithmetic.
  std::vector<std::int64_t> w(nsym);
  for (int r = -r_max_; r <= r_max_; ++r) {
    double p = detmath::normal_mass((r - 0.5) / sigma, (r + 0.5) / sigma);
    w[r + r_max_] = std::llround(p * static_cast<double>(kWeightScale));
  }
  double p_lo = detmath::normal_cdf((-r_max_ - 0.5) / sigma);
  w[esc_low()] = std::llround(p_lo * static_cast<double>(kWeightScale));
  w[esc_high()] = w[esc_low()];

  std::int64_t total_w = std::accumulate(w.begin(), w.end(), std::int64_t{0});
  if (total_w <= 0) throw Error("CdfTable: degenerate weights");

  // Largest-remainder apportionment of 2^16 units.
  std::vector<std::uint32_t> f(nsym);
  std::vector<std::pair<std::int64_t, int>> rem(nsym);
  std::int64_t assigned = 0;
  for (int s = 0; s < nsym; ++s) {
    std::int64_t num = w[s] * static_cast<std::int64_t>(kTotal);
    f[s] = static_cast<std::uint32_t>(num / total_w);
    rem[s] = {num % total_w, s};
    assigned += f[s];
  }
  std::int64_t deficit = static_cast<std::int64_t>(kTotal) - assigned;
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::int64_t d = 0; d < deficit; ++d) f[rem[static_cast<std::size_t>(d)].second] += 1;

  // Enforce the >=1 floor by stealing from the current maximum.
  for (int s = 0; s < nsym; ++s) {
    while (f[s] == 0) {
      int donor = static_cast<int>(std::max_element(f.begin(), f.end()) - f.begin());
      if (f[donor] <= 1) throw Error("CdfTable: cannot satisfy frequency floor");
      f[donor] -= 1;
      f[s] += 1;
    }
  }

  cum_.resize(nsym + 1);
  cum_[0] = 0;
  for (int s = 0; s < nsym; ++s) cum_[s + 1] = cum_[s] + f[s];
  if (cum_.back() != kTotal) throw Error("CdfTable: total mismatch");
}

int CdfTable::symbol_from_cum(std::uint32_t fval) const {
  // Upper bound over the strictly increasing cum_ array.
  int lo = 0, hi = num_symbols() - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (cum_[mid] <= fval) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

double CdfTable::ideal_bits(std::int64_t residual) const {
  int sym = symbol_of(residual);
  double bits = -std::log2(static_cast<double>(freq(sym)) / kTotal);
  if (sym == esc_low() || sym == esc_high()) bits += 32.0;
  return bits;
}

void RangeEncoder::shift_low() {
  // resolvable once the outgoing byte cannot be touched by a later carry
  if ((low_ & kRangeMask) < (0xFFull << 40) || (low_ >> 48) != 0) {
    std::uint8_t carry = static_cast<std::uint8_t>(low_ >> 48);
    do {
      out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
      cache_ = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 40);
  }
  ++cache_size_;
  low_ = (low_ << 8) & kRangeMask;
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
  range_ /= total;
  low_ += static_cast<std::uint64_t>(cum) * range_;
  range_ *= freq;
  while (range_ < kRenormBound) {
    shift_low();
    range_ <<= 8;
  }
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 7; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(const std::vector<std::uint8_t>& payload) : in_(&payload) {
  for (int i = 0; i < 7; ++i) code_ = ((code_ << 8) | next_byte()) & RangeEncoder::kRangeMask;
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= in_->size()) throw FormatError("range decoder: stream exhausted");
  return (*in_)[pos_++];
}

std::uint32_t RangeDecoder::decode_freq(std::uint32_t total) {
  r_ = range_ / total;
  std::uint64_t f = code_ / r_;
  return f < total ? static_cast<std::uint32_t>(f) : total - 1;
}

void RangeDecoder::decode_update(std::uint32_t cum, std::uint32_t freq) {
  code_ -= cum * r_;
  range_ = freq * r_;
  while (range_ < RangeEncoder::kRenormBound) {
    code_ = ((code_ << 8) | next_byte()) & RangeEncoder::kRangeMask;
    range_ <<= 8;
  }
}

int RangeDecoder::decode_symbol(const CdfTable& table) {
  std::uint32_t f = decode_freq(CdfTable::kTotal);
  int sym = table.symbol_from_cum(f);
  decode_update(table.cum(sym), table.freq(sym));
  return sym;
}

std::uint8_t RangeDecoder::decode_raw_byte() {
  std::uint32_t f = decode_freq(1u << 16);
  std::uint8_t b = static_cast<std::uint8_t>(f >> 8);
  decode_update(b * 256u, 256u);
  return b;
}

std::vector<std::uint8_t> encode_residuals(const std::vector<std::int32_t>& residuals,
                                           const std::vector<const CdfTable*>& tables) {
  if (residuals.size() != tables.size())
    throw Error("encode_residuals: table/sequence length mismatch");
  RangeEncoder enc;
  for (std::size_t n = 0; n < residuals.size(); ++n) {
    const CdfTable& t = *tables[n];
    std::int32_t r = residuals[n];
    int sym = t.symbol_of(r);
    enc.encode_symbol(t, sym);
    if (sym == t.esc_low() || sym == t.esc_high()) {
      std::uint32_t u = static_cast<std::uint32_t>(r);
      enc.encode_raw_byte(static_cast<std::uint8_t>(u >> 24));
      enc.encode_raw_byte(static_cast<std::uint8_t>(u >> 16));
      enc.encode_raw_byte(static_cast<std::uint8_t>(u >> 8));
      enc.encode_raw_byte(static_cast<std::uint8_t>(u));
    }
  }
  return enc.finish();
}

std::vector<std::int32_t> decode_residuals(const std::vector<std::uint8_t>& payload,
                                           const std::vector<const CdfTable*>& tables) {
  RangeDecoder dec(payload);
  std::vector<std::int32_t> out(tables.size());
  for (std::size_t n = 0; n < tables.size(); ++n) {
    const CdfTable& t = *tables[n];
    int sym = dec.decode_symbol(t);
    if (sym == t.esc_low() || sym == t.esc_high()) {
      std::uint32_t u = 0;
      for (int b = 0; b < 4; ++b) u = (u << 8) | dec.decode_raw_byte();
      out[n] = static_cast<std::int32_t>(u);
    } else {
      out[n] = sym - t.r_max();
    }
  }
  return out;
}

double ideal_payload_bits(const std::vector<std::int32_t>& residuals,
                          const std::vector<const CdfTable*>& tables) {
  if (residuals.size() != tables.size())
    throw Error("ideal_payload_bits: length mismatch");
  double bits = 0.0;
  for (std::size_t n = 0; n < residuals.size(); ++n)
    bits += tables[n]->ideal_bits(residuals[n]);
  return bits;
}

}  // namespace quadsim
