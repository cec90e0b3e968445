// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"
#include "sideinfo/sideinfo.hpp"

using namespace quadsim;

namespace {

RateMap make_map(int h, int w, const std::vector<int>& rate_set,
                 const std::vector<int>& indices) {
  RateMap m;
  m.h_y = h;
  m.w_y = w;
  m.rate_set = rate_set;
  m.indices.assign(indices.begin(), indices.end());
  return m;
}

int naive_bits(const RateMap& m) {
  int bits = 0;
  while ((1 << bits) < static_cast<int>(m.rate_set.size())) ++bits;
  return static_cast<int>(m.indices.size()) * bits;
}

}  // namespace

TEST_CASE("constant maps compress to a couple dozen bytes") {
  std::vector<int> rate_set = {0, 4, 8, 16, 24, 32, 48, 64};
  for (int v : {0, 3, 7}) {
    RateMap m = make_map(32, 32, rate_set,
                         std::vector<int>(32 * 32, v));
    auto bytes = encode_rate_map(m);
    CHECK(bytes.size() <= 24);
    RateMap back = decode_rate_map(bytes, 32, 32, rate_set);
    CHECK(back.indices == m.indices);
  }
}

TEST_CASE("random maps stay within 5% of the naive bound") {
  std::vector<int> rate_set = {0, 1, 2, 3, 4, 5, 6, 7};
  SeededStream rng(61, "rand-map");
  std::vector<int> idx(16 * 16);
  for (auto& v : idx) v = static_cast<int>(rng.below(8));
  RateMap m = make_map(16, 16, rate_set, idx);
  auto bytes = encode_rate_map(m);
  double bits = static_cast<double>(bytes.size()) * 8.0;
  CHECK(bits <= 768.0 * 1.05);
  CHECK(decode_rate_map(bytes, 16, 16, rate_set).indices == m.indices);
}

TEST_CASE("smooth maps compress below half the naive bound") {
  // AR(1)-correlated field (rho 0.9) quantized onto 8 levels
  std::vector<int> rate_set = {0, 1, 2, 3, 4, 5, 6, 7};
  SeededStream rng(62, "smooth-map");
  const int h = 32, w = 32;
  std::vector<double> f(static_cast<std::size_t>(h) * w);
  for (auto& v : f) v = rng.normal();
  for (int i = 0; i < h; ++i)
    for (int j = 1; j < w; ++j)
      f[static_cast<std::size_t>(i) * w + j] =
          0.9 * f[static_cast<std::size_t>(i) * w + j - 1] +
          std::sqrt(1 - 0.81) * f[static_cast<std::size_t>(i) * w + j];
  for (int j = 0; j < w; ++j)
    for (int i = 1; i < h; ++i)
      f[static_cast<std::size_t>(i) * w + j] =
          0.9 * f[static_cast<std::size_t>(i - 1) * w + j] +
          std::sqrt(1 - 0.81) * f[static_cast<std::size_t>(i) * w + j];
  std::vector<int> idx(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) {
    int q = static_cast<int>(std::floor(f[n] * 0.9 + 4.0));
    idx[n] = std::clamp(q, 0, 7);
  }
  RateMap m = make_map(h, w, rate_set, idx);
  auto bytes = encode_rate_map(m);
  CHECK(static_cast<double>(bytes.size()) * 8.0 < 0.5 * naive_bits(m));
  CHECK(decode_rate_map(bytes, h, w, rate_set).indices == m.indices);
}

TEST_CASE("fuzzed maps round trip and respect the naive bound") {
  SeededStream rng(63, "fuzz-map");
  for (int trial = 0; trial < 1000; ++trial) {
    int h = 1 + static_cast<int>(rng.below(12));
    int w = 1 + static_cast<int>(rng.below(12));
    int n_rates = 1 + static_cast<int>(rng.below(12));
    std::vector<int> rate_set(static_cast<std::size_t>(n_rates));
    for (int i = 0; i < n_rates; ++i) rate_set[static_cast<std::size_t>(i)] = i * 4;
    std::vector<int> idx(static_cast<std::size_t>(h) * w);
    for (auto& v : idx) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_rates)));
    RateMap m = make_map(h, w, rate_set, idx);
    auto bytes = encode_rate_map(m);
    CHECK(decode_rate_map(bytes, h, w, rate_set).indices == m.indices);
    CHECK(static_cast<double>(bytes.size()) * 8.0 <= naive_bits(m) + 64.0);
  }
}

TEST_CASE("degenerate and corrupt inputs") {
  std::vector<int> rate_set = {0, 8};
  RateMap empty = make_map(0, 0, rate_set, {});
  auto bytes = encode_rate_map(empty);
  RateMap back = decode_rate_map(bytes, 0, 0, rate_set);
  CHECK(back.indices.empty());

  RateMap m = make_map(4, 4, rate_set, std::vector<int>(16, 1));
  auto coded = encode_rate_map(m);
  // decoding under bigger dims must fail, not fabricate data
  CHECK_THROWS_AS(decode_rate_map(coded, 32, 32, rate_set), Error);
  CHECK_THROWS_AS(decode_rate_map({}, 4, 4, rate_set), FormatError);
  CHECK_THROWS_AS(decode_rate_map({0x07, 0x00}, 4, 4, rate_set), FormatError);
}

TEST_CASE("side bundle carries map, stats and scale exactly") {
  LatentGrid y(4, 4, 8);
  SeededStream rng(64, "bundle");
  for (auto& v : y.values) v = 5.0 * rng.normal() + 1.0;
  HyperStats hyper = estimate_hyper(y, 0.11);

  std::vector<int> rate_set = {0, 2, 4, 8};
  std::vector<int> idx(16);
  for (auto& v : idx) v = static_cast<int>(rng.below(4));
  RateMap m = make_map(4, 4, rate_set, idx);

  auto bytes = encode_side_bundle(m, hyper, 1.25f);
  SideBundle bundle = decode_side_bundle(bytes, rate_set, 0.11);
  CHECK(bundle.rate_map.indices == m.indices);
  CHECK(bundle.hyper == hyper);
  CHECK(bundle.power_scale == 1.25f);
  CHECK(bundle.total_bits == bytes.size() * 8);
  CHECK(bundle.map_bits > 0);

  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + 10);
  CHECK_THROWS_AS(decode_side_bundle(truncated, rate_set, 0.11), FormatError);
}

TEST_CASE("frozen side bundle bytes pin the wire format") {
  HyperStats hyper({-7, 31}, {0, 12}, 0.11);
  RateMap map;
  map.h_y = map.w_y = 2;
  map.rate_set = {0, 4, 8};
  map.indices = {2, 1, 1, 0};
  auto bytes = encode_side_bundle(map, hyper, 1.5f);
  const std::vector<std::uint8_t> golden{
      0x51, 0x53, 0x49, 0x44, 0x01, 0x02, 0x00, 0x02, 0x00, 0x03,
      0x00, 0x00, 0x00, 0xc0, 0x3f, 0x02, 0x00, 0xf9, 0xff, 0x00,
      0x1f, 0x00, 0x0c, 0x02, 0x00, 0x00, 0x00, 0x01, 0x94};
  CHECK(bytes == golden);
  SideBundle back = decode_side_bundle(golden, map.rate_set, 0.11);
  CHECK(back.rate_map.indices == map.indices);
  CHECK(back.power_scale == 1.5f);
}

TEST_CASE("cbr_report reproduces the worked side-info example") {
  // 16x16 map at 3-bit indices on a 256x256 image with C_k = 2
  CbrBreakdown b = cbr_report(0, 16.0 * 16.0 * 3.0, 256, 256, 2.0);
  CHECK(b.side_cbr == doctest::Approx(768.0 / 393216.0).epsilon(1e-12));
  CHECK(b.side_cbr == doctest::Approx(0.001953125).epsilon(1e-12));
  CHECK(b.payload_cbr == 0.0);
  CHECK(b.total_cbr == b.side_cbr);

  CbrBreakdown z = cbr_report(0, 0.0, 64, 64, 2.0);
  CHECK(z.payload_cbr == 0.0);
  CHECK(z.side_cbr == 0.0);
  CHECK(z.total_cbr == 0.0);

  // the naive per-unit index width for C_y = 320 is ceil(log2 320) = 9
  int bits = 0;
  while ((1 << bits) < 321) ++bits;
  CHECK(bits == 9);

  CHECK_THROWS_AS(cbr_report(1, 1.0, 4, 4, 0.0), Error);
}
