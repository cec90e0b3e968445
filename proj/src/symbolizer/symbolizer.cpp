// SPDX-License-Identifier: Apache-2.0

#include "symbolizer/symbolizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include "core/error.hpp"

namespace quadsim {

RateMap rate_match(const std::vector<int>& raw_k, int h_y, int w_y,
                   const std::vector<int>& rate_set) {
  if (rate_set.empty()) throw Error("rate_match: empty rate_set");
  if (raw_k.size() != static_cast<std::size_t>(h_y) * w_y)
    throw Error("rate_match: raw_k size mismatch");
  RateMap map;
  map.h_y = h_y;
  map.w_y = w_y;
  map.rate_set = rate_set;
  map.indices.resize(raw_k.size());
  for (std::size_t n = 0; n < raw_k.size(); ++n) {
    int best = 0;
    long best_dist = std::labs(static_cast<long>(raw_k[n]) - rate_set[0]);
    for (std::size_t s = 1; s < rate_set.size(); ++s) {
      long d = std::labs(static_cast<long>(raw_k[n]) - rate_set[s]);
      if (d < best_dist) {  // tie keeps the smaller rate
        best_dist = d;
        best = static_cast<int>(s);
      }
    }
    map.indices[n] = static_cast<std::uint16_t>(best);
  }
  return map;
}

namespace {

struct BankKey {
  std::uint64_t seed;
  int c_y;
  int k;
  bool operator<(const BankKey& o) const {
    if (seed != o.seed) return seed < o.seed;
    if (c_y != o.c_y) return c_y < o.c_y;
    return k < o.k;
  }
};

std::mutex g_bank_mutex;
std::map<BankKey, std::shared_ptr<const SquareMatrix>> g_bank_cache;

std::shared_ptr<const SquareMatrix> cached_orthogonal(std::uint64_t seed, int c_y, int k) {
  BankKey key{seed, c_y, k};
  {
    std::lock_guard<std::mutex> lock(g_bank_mutex);
    auto it = g_bank_cache.find(key);
    if (it != g_bank_cache.end()) return it->second;
  }
  SeededStream rng(seed, "bank/k=" + std::to_string(k));
  auto q = std::make_shared<SquareMatrix>(random_orthogonal(c_y, rng));
  std::lock_guard<std::mutex> lock(g_bank_mutex);
  auto [it, inserted] = g_bank_cache.emplace(key, std::move(q));
  return it->second;
}

}  // namespace

MappingBank::MappingBank(std::uint64_t master_seed, int c_y,
                         const std::vector<int>& rate_set)
    : c_y_(c_y) {
  if (c_y < 1) throw Error("MappingBank: bad c_y");
  for (int k : rate_set) {
    if (k < 0 || k > c_y) throw Error("MappingBank: rate value out of range");
    if (k == 0) continue;  // zero-rate units carry nothing
    matrices_[k] = cached_orthogonal(master_seed, c_y, k);
  }
}

const SquareMatrix& MappingBank::matrix_for(int k) const {
  auto it = matrices_.find(k);
  if (it == matrices_.end()) throw Error("MappingBank: rate not in bank");
  return *it->second;
}

void MappingBank::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("MappingBank: cannot write " + path);
  auto put_u16 = [&](std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
    out.write(b, 2);
  };
  out.write("QBNK", 4);
  put_u16(static_cast<std::uint16_t>(c_y_));
  put_u16(static_cast<std::uint16_t>(matrices_.size()));
  for (const auto& [k, m] : matrices_) {
    put_u16(static_cast<std::uint16_t>(k));
    out.write(reinterpret_cast<const char*>(m->a.data()),
              static_cast<std::streamsize>(m->a.size() * sizeof(double)));
  }
}

MappingBank MappingBank::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("MappingBank: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "QBNK", 4) != 0)
    throw FormatError("MappingBank: bad magic");
  auto get_u16 = [&]() -> std::uint16_t {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    if (!in) throw FormatError("MappingBank: truncated file");
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  };
  MappingBank bank;
  bank.c_y_ = get_u16();
  int count = get_u16();
  for (int e = 0; e < count; ++e) {
    int k = get_u16();
    auto m = std::make_shared<SquareMatrix>(bank.c_y_);
    in.read(reinterpret_cast<char*>(m->a.data()),
            static_cast<std::streamsize>(m->a.size() * sizeof(double)));
    if (!in) throw FormatError("MappingBank: truncated matrix data");
    bank.matrices_[k] = std::move(m);
  }
  return bank;
}

namespace {

std::vector<double> standardize(const std::vector<double>& y_unit,
                                const HyperStats& hyper) {
  if (static_cast<int>(y_unit.size()) != hyper.channels())
    throw Error("map_unit: unit length must be C_y");
  std::vector<double> t(y_unit.size());
  for (std::size_t c = 0; c < y_unit.size(); ++c)
    t[c] = (y_unit[c] - hyper.mu(static_cast<int>(c))) / hyper.sigma(static_cast<int>(c));
  return t;
}

}  // namespace

std::vector<double> map_unit(const std::vector<double>& y_unit, const HyperStats& hyper,
                             int k, const MappingBank& bank) {
  if (k == 0) return {};
  if (!bank.has_rate(k)) throw Error("map_unit: k not in rate set");
  return multiply_top_rows(bank.matrix_for(k), k, standardize(y_unit, hyper));
}

std::vector<double> unmap_unit(const std::vector<double>& r, const HyperStats& hyper,
                               int k, const MappingBank& bank) {
  if (static_cast<int>(r.size()) != k) throw Error("unmap_unit: length mismatch");
  std::vector<double> t_hat;
  if (k == 0) {
    t_hat.assign(static_cast<std::size_t>(hyper.channels()), 0.0);
  } else {
    if (!bank.has_rate(k)) throw Error("unmap_unit: k not in rate set");
    t_hat = multiply_top_rows_transposed(bank.matrix_for(k), k, r);
  }
  std::vector<double> y(t_hat.size());
  for (std::size_t c = 0; c < y.size(); ++c)
    y[c] = hyper.mu(static_cast<int>(c)) + hyper.sigma(static_cast<int>(c)) * t_hat[c];
  return y;
}

std::vector<std::pair<int, int>> frame_unit_order(int h_y, int w_y) {
  std::vector<std::pair<int, int>> order;
  order.reserve(static_cast<std::size_t>(h_y) * w_y);
  static constexpr int kClassOrder[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (const auto& cls : kClassOrder)
    for (int i = cls[0]; i < h_y; i += 2)
      for (int j = cls[1]; j < w_y; j += 2) order.emplace_back(i, j);
  return order;
}

std::size_t frame_symbol_count(const RateMap& rate_map) {
  std::size_t l = 0;
  for (int i = 0; i < rate_map.h_y; ++i)
    for (int j = 0; j < rate_map.w_y; ++j)
      l += static_cast<std::size_t>((rate_map.rate_at(i, j) + 1) / 2);
  return l;
}

SymbolFrame pack_frame(const std::vector<std::vector<double>>& mapped_units,
                       const RateMap& rate_map) {
  const auto order = frame_unit_order(rate_map.h_y, rate_map.w_y);
  if (mapped_units.size() != order.size())
    throw Error("pack_frame: unit count mismatch");

  SymbolFrame frame;
  frame.rate_map = rate_map;
  frame.symbols.reserve(frame_symbol_count(rate_map));
  double energy = 0.0;
  for (std::size_t u = 0; u < order.size(); ++u) {
    auto [i, j] = order[u];
    const std::vector<double>& r = mapped_units[u];
    int k = rate_map.rate_at(i, j);
    if (static_cast<int>(r.size()) != k)
      throw Error("pack_frame: unit length disagrees with rate map");
    for (int m = 0; m + 1 < k; m += 2) {
      frame.symbols.emplace_back(r[static_cast<std::size_t>(m)],
                                 r[static_cast<std::size_t>(m) + 1]);
      energy += r[static_cast<std::size_t>(m)] * r[static_cast<std::size_t>(m)] +
                r[static_cast<std::size_t>(m) + 1] * r[static_cast<std::size_t>(m) + 1];
    }
    if (k % 2 == 1) {
      frame.symbols.emplace_back(r[static_cast<std::size_t>(k) - 1], 0.0);
      energy += r[static_cast<std::size_t>(k) - 1] * r[static_cast<std::size_t>(k) - 1];
    }
  }

  double l = static_cast<double>(frame.symbols.size());
  if (l > 0.0 && energy > 0.0) {
    frame.power_scale = static_cast<float>(std::sqrt(l / energy));
  } else {
    frame.power_scale = 1.0f;
  }
  double a = static_cast<double>(frame.power_scale);
  for (auto& s : frame.symbols) s *= a;
  return frame;
}

std::vector<std::vector<double>> unpack_frame(const std::vector<std::complex<double>>& symbols,
                                              float power_scale, const RateMap& rate_map) {
  if (symbols.size() != frame_symbol_count(rate_map))
    throw Error("unpack_frame: symbol count disagrees with rate map");
  const double inv = 1.0 / static_cast<double>(power_scale);
  const auto order = frame_unit_order(rate_map.h_y, rate_map.w_y);
  std::vector<std::vector<double>> units(order.size());
  std::size_t pos = 0;
  for (std::size_t u = 0; u < order.size(); ++u) {
    auto [i, j] = order[u];
    int k = rate_map.rate_at(i, j);
    std::vector<double>& r = units[u];
    r.resize(static_cast<std::size_t>(k));
    for (int m = 0; m < k; m += 2) {
      const std::complex<double>& s = symbols[pos++];
      r[static_cast<std::size_t>(m)] = s.real() * inv;
      if (m + 1 < k) r[static_cast<std::size_t>(m) + 1] = s.imag() * inv;
    }
  }
  return units;
}

std::vector<std::uint8_t> serialize_symbols(const std::vector<std::complex<double>>& s) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + s.size() * 8);
  std::uint32_t n = static_cast<std::uint32_t>(s.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((n >> (8 * i)) & 0xFF));
  auto put_f32 = [&](float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int i = 0; i < 4; ++i)
      out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
  };
  for (const auto& z : s) {
    put_f32(static_cast<float>(z.real()));
    put_f32(static_cast<float>(z.imag()));
  }
  return out;
}

std::vector<std::complex<double>> parse_symbols(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw FormatError("symbol dump: truncated");
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  if (bytes.size() < 4 + static_cast<std::size_t>(n) * 8)
    throw FormatError("symbol dump: truncated");
  auto get_f32 = [&](std::size_t off) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i)
      bits |= static_cast<std::uint32_t>(bytes[off + static_cast<std::size_t>(i)]) << (8 * i);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  };
  std::vector<std::complex<double>> s(n);
  for (std::uint32_t i = 0; i < n; ++i)
    s[i] = {get_f32(4 + i * 8), get_f32(4 + i * 8 + 4)};
  return s;
}

}  // namespace quadsim
