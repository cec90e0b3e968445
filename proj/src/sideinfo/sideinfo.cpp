// SPDX-License-Identifier: Apache-2.0

#include "sideinfo/sideinfo.hpp"

#include <algorithm>
#include <cstring>

#include "core/error.hpp"
#include "rangecoder/rangecoder.hpp"

namespace quadsim {

namespace {

// Order-0 adaptive frequency model; counts halve when the total nears the
// coder's 16-bit precision limit.
class AdaptiveModel {
 public:
  explicit AdaptiveModel(int num_symbols)
      : counts_(static_cast<std::size_t>(num_symbols), 1),
        total_(static_cast<std::uint32_t>(num_symbols)) {}

  std::uint32_t total() const { return total_; }
  std::uint32_t freq(int sym) const { return counts_[static_cast<std::size_t>(sym)]; }
  std::uint32_t cum(int sym) const {
    std::uint32_t c = 0;
    for (int s = 0; s < sym; ++s) c += counts_[static_cast<std::size_t>(s)];
    return c;
  }
  int symbol_from_cum(std::uint32_t f) const {
    std::uint32_t c = 0;
    for (std::size_t s = 0; s < counts_.size(); ++s) {
      if (f < c + counts_[s]) return static_cast<int>(s);
      c += counts_[s];
    }
    return static_cast<int>(counts_.size()) - 1;
  }
  void update(int sym) {
    counts_[static_cast<std::size_t>(sym)] += 32;
    total_ += 32;
    if (total_ >= (1u << 15)) {
      total_ = 0;
      for (auto& c : counts_) {
        c = (c + 1) / 2;
        total_ += c;
      }
    }
  }

 private:
  std::vector<std::uint32_t> counts_;
  std::uint32_t total_;
};

std::vector<int> delta_filter(const RateMap& map) {
  std::vector<int> d(map.indices.size());
  for (int i = 0; i < map.h_y; ++i) {
    for (int j = 0; j < map.w_y; ++j) {
      int cur = map.index_at(i, j);
      int pred = 0;
      if (j > 0) {
        pred = map.index_at(i, j - 1);
      } else if (i > 0) {
        pred = map.index_at(i - 1, 0);
      }
      d[static_cast<std::size_t>(i) * map.w_y + j] = cur - pred;
    }
  }
  return d;
}

int bits_per_index(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

std::vector<std::uint8_t> encode_mode_delta(const RateMap& map, int n) {
  const int alphabet = 2 * n - 1;  // deltas in [-(n-1), n-1]
  AdaptiveModel model(alphabet);
  RangeEncoder enc;
  for (int d : delta_filter(map)) {
    int sym = d + (n - 1);
    enc.encode(model.cum(sym), model.freq(sym), model.total());
    model.update(sym);
  }
  return enc.finish();
}

std::vector<std::uint8_t> encode_mode_packed(const RateMap& map, int n) {
  const int bits = bits_per_index(n);
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int acc_bits = 0;
  for (std::uint16_t idx : map.indices) {
    acc = (acc << bits) | idx;
    acc_bits += bits;
    while (acc_bits >= 8) {
      out.push_back(static_cast<std::uint8_t>((acc >> (acc_bits - 8)) & 0xFF));
      acc_bits -= 8;
    }
  }
  if (acc_bits > 0)
    out.push_back(static_cast<std::uint8_t>((acc << (8 - acc_bits)) & 0xFF));
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_rate_map(const RateMap& map) {
  const int n = static_cast<int>(map.rate_set.size());
  if (n < 1) throw Error("encode_rate_map: empty rate set");
  for (std::uint16_t idx : map.indices)
    if (idx >= map.rate_set.size()) throw Error("encode_rate_map: index out of range");

  std::vector<std::uint8_t> packed = encode_mode_packed(map, n);
  if (map.indices.empty()) {
    return {0x01};  // empty map: trivial packed mode
  }
  std::vector<std::uint8_t> delta = encode_mode_delta(map, n);

  std::vector<std::uint8_t> out;
  if (delta.size() < packed.size()) {
    out.push_back(0x00);
    out.insert(out.end(), delta.begin(), delta.end());
  } else {
    out.push_back(0x01);
    out.insert(out.end(), packed.begin(), packed.end());
  }
  return out;
}

RateMap decode_rate_map(const std::vector<std::uint8_t>& bytes, int h_y, int w_y,
                        const std::vector<int>& rate_set) {
  if (bytes.empty()) throw FormatError("rate map: empty payload");
  const int n = static_cast<int>(rate_set.size());
  if (n < 1) throw Error("decode_rate_map: empty rate set");
  RateMap map;
  map.h_y = h_y;
  map.w_y = w_y;
  map.rate_set = rate_set;
  map.indices.resize(static_cast<std::size_t>(h_y) * w_y);
  if (map.indices.empty()) return map;

  const std::uint8_t mode = bytes[0];
  if (mode == 0x00) {
    std::vector<std::uint8_t> payload(bytes.begin() + 1, bytes.end());
    RangeDecoder dec(payload);
    AdaptiveModel model(2 * n - 1);
    std::vector<int> deltas(map.indices.size());
    for (auto& d : deltas) {
      std::uint32_t f = dec.decode_freq(model.total());
      int sym = model.symbol_from_cum(f);
      dec.decode_update(model.cum(sym), model.freq(sym));
      model.update(sym);
      d = sym - (n - 1);
    }
    for (int i = 0; i < h_y; ++i) {
      for (int j = 0; j < w_y; ++j) {
        int pred = 0;
        if (j > 0) {
          pred = map.index_at(i, j - 1);
        } else if (i > 0) {
          pred = map.index_at(i - 1, 0);
        }
        int idx = pred + deltas[static_cast<std::size_t>(i) * w_y + j];
        if (idx < 0 || idx >= n) throw FormatError("rate map: corrupt delta stream");
        map.indices[static_cast<std::size_t>(i) * w_y + j] =
            static_cast<std::uint16_t>(idx);
      }
    }
  } else if (mode == 0x01) {
    const int bits = bits_per_index(n);
    const std::size_t need = (map.indices.size() * static_cast<std::size_t>(bits) + 7) / 8;
    if (bytes.size() - 1 < need) throw FormatError("rate map: truncated packed payload");
    std::uint32_t acc = 0;
    int acc_bits = 0;
    std::size_t pos = 1;
    for (auto& idx : map.indices) {
      while (acc_bits < bits) {
        acc = (acc << 8) | bytes[pos++];
        acc_bits += 8;
      }
      std::uint32_t v = bits == 0 ? 0 : (acc >> (acc_bits - bits)) & ((1u << bits) - 1);
      acc_bits -= bits;
      if (v >= static_cast<std::uint32_t>(n)) throw FormatError("rate map: index out of range");
      idx = static_cast<std::uint16_t>(v);
    }
  } else {
    throw FormatError("rate map: unknown mode byte");
  }
  return map;
}

namespace {

constexpr char kSideMagic[4] = {'Q', 'S', 'I', 'D'};
constexpr std::uint8_t kSideVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

}  // namespace

std::vector<std::uint8_t> encode_side_bundle(const RateMap& map, const HyperStats& hyper,
                                             float power_scale) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kSideMagic, kSideMagic + 4);
  out.push_back(kSideVersion);
  put_u16(out, static_cast<std::uint16_t>(map.h_y));
  put_u16(out, static_cast<std::uint16_t>(map.w_y));
  put_u16(out, static_cast<std::uint16_t>(map.rate_set.size()));
  std::uint32_t scale_bits;
  std::memcpy(&scale_bits, &power_scale, 4);
  put_u32(out, scale_bits);
  hyper.serialize(out);
  std::vector<std::uint8_t> coded = encode_rate_map(map);
  put_u32(out, static_cast<std::uint32_t>(coded.size()));
  out.insert(out.end(), coded.begin(), coded.end());
  return out;
}

SideBundle decode_side_bundle(const std::vector<std::uint8_t>& bytes,
                              const std::vector<int>& rate_set, double sigma_min) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (bytes.size() - pos < n) throw FormatError("side bundle: truncated");
  };
  need(4 + 1 + 2 + 2 + 2 + 4);
  if (std::memcmp(bytes.data(), kSideMagic, 4) != 0)
    throw FormatError("side bundle: bad magic");
  pos = 4;
  if (bytes[pos++] != kSideVersion) throw FormatError("side bundle: unsupported version");
  auto get_u16 = [&]() {
    std::uint16_t v = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
    pos += 2;
    return v;
  };
  int h_y = get_u16();
  int w_y = get_u16();
  int n = get_u16();
  if (n != static_cast<int>(rate_set.size()))
    throw Error("side bundle: rate set size disagrees with config");
  need(4);
  std::uint32_t scale_bits = 0;
  for (int i = 0; i < 4; ++i) scale_bits |= static_cast<std::uint32_t>(bytes[pos + static_cast<std::size_t>(i)]) << (8 * i);
  pos += 4;
  SideBundle bundle;
  std::memcpy(&bundle.power_scale, &scale_bits, 4);
  bundle.hyper = HyperStats::deserialize(bytes, pos, sigma_min);
  need(4);
  std::uint32_t map_len = 0;
  for (int i = 0; i < 4; ++i) map_len |= static_cast<std::uint32_t>(bytes[pos + static_cast<std::size_t>(i)]) << (8 * i);
  pos += 4;
  need(map_len);
  std::vector<std::uint8_t> coded(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                  bytes.begin() + static_cast<std::ptrdiff_t>(pos + map_len));
  bundle.rate_map = decode_rate_map(coded, h_y, w_y, rate_set);
  bundle.map_bits = coded.size() * 8;
  bundle.total_bits = bytes.size() * 8;
  return bundle;
}

CbrBreakdown cbr_report(std::size_t symbol_count, double side_bits, int height,
                        int width, double c_k) {
  if (!(c_k > 0.0)) throw Error("cbr_report: C_k must be > 0");
  CbrBreakdown b;
  double n = 3.0 * height * width;
  b.payload_cbr = n > 0.0 ? static_cast<double>(symbol_count) / n : 0.0;
  b.side_cbr = n > 0.0 ? side_bits / (n * c_k) : 0.0;
  b.total_cbr = b.payload_cbr + b.side_cbr;
  return b;
}

}  // namespace quadsim
