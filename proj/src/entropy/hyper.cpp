// SPDX-License-Identifier: Apache-2.0

#include "entropy/hyper.hpp"

#include <algorithm>
#include <cmath>

#include "core/detmath.hpp"
#include "core/error.hpp"

namespace quadsim {

HyperStats::HyperStats(std::vector<std::int16_t> mu_idx,
                       std::vector<std::uint8_t> sigma_idx, double sigma_min)
    : mu_idx_(std::move(mu_idx)), sigma_idx_(std::move(sigma_idx)),
      sigma_min_(sigma_min) {
  if (mu_idx_.size() != sigma_idx_.size()) throw Error("HyperStats: size mismatch");
  if (!(sigma_min > 0.0) || sigma_min >= kSigmaMax) throw Error("HyperStats: bad sigma_min");
  build_grid();
}

void HyperStats::build_grid() {
  // sigma_i = sigma_min * (256/sigma_min)^(i/63); detmath keeps the grid
  // values identical across platforms.
  sigma_grid_.resize(kSigmaLevels);
  const double span = detmath::log(kSigmaMax / sigma_min_);
  for (int i = 0; i < kSigmaLevels; ++i) {
    sigma_grid_[i] = sigma_min_ * detmath::exp(span * i / (kSigmaLevels - 1));
  }
  sigma_grid_[0] = sigma_min_;
  sigma_grid_[kSigmaLevels - 1] = kSigmaMax;
}

std::int16_t HyperStats::quantize_mu(double mu) {
  double idx = std::round(mu / kMuStep);
  idx = std::clamp(idx, -32768.0, 32767.0);
  return static_cast<std::int16_t>(idx);
}

std::uint8_t HyperStats::quantize_sigma(double sigma) const {
  sigma = std::clamp(sigma, sigma_min_, kSigmaMax);
  const double span = detmath::log(kSigmaMax / sigma_min_);
  double level = std::round((kSigmaLevels - 1) * detmath::log(sigma / sigma_min_) / span);
  level = std::clamp(level, 0.0, static_cast<double>(kSigmaLevels - 1));
  return static_cast<std::uint8_t>(level);
}

void HyperStats::serialize(std::vector<std::uint8_t>& out) const {
  auto put_u16 = [&](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  put_u16(static_cast<std::uint16_t>(channels()));
  for (int c = 0; c < channels(); ++c) {
    put_u16(static_cast<std::uint16_t>(mu_idx_[c]));
    out.push_back(sigma_idx_[c]);
  }
}

HyperStats HyperStats::deserialize(const std::vector<std::uint8_t>& in,
                                   std::size_t& pos, double sigma_min) {
  auto get_u16 = [&]() -> std::uint16_t {
    if (pos + 2 > in.size()) throw FormatError("HyperStats: truncated header");
    std::uint16_t v = static_cast<std::uint16_t>(in[pos] | (in[pos + 1] << 8));
    pos += 2;
    return v;
  };
  int n = get_u16();
  std::vector<std::int16_t> mu(n);
  std::vector<std::uint8_t> sg(n);
  for (int c = 0; c < n; ++c) {
    mu[c] = static_cast<std::int16_t>(get_u16());
    if (pos >= in.size()) throw FormatError("HyperStats: truncated header");
    sg[c] = in[pos++];
  }
  return HyperStats(std::move(mu), std::move(sg), sigma_min);
}

HyperStats estimate_hyper(const LatentGrid& y, double sigma_min) {
  if (y.h_y == 0 || y.w_y == 0 || y.c_y == 0) throw Error("estimate_hyper: empty grid");
  const std::size_t n = static_cast<std::size_t>(y.h_y) * y.w_y;
  std::vector<std::int16_t> mu_idx(y.c_y);
  std::vector<std::uint8_t> sg_idx(y.c_y);
  HyperStats grid_probe({}, {}, sigma_min);  // for the quantizer grid
  for (int c = 0; c < y.c_y; ++c) {
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < y.h_y; ++i)
      for (int j = 0; j < y.w_y; ++j) {
        double v = y.at(i, j, c);
        sum += v;
        sum2 += v * v;
      }
    double mean = sum / static_cast<double>(n);
    double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
    mu_idx[c] = HyperStats::quantize_mu(mean);
    sg_idx[c] = grid_probe.quantize_sigma(std::sqrt(var));
  }
  return HyperStats(std::move(mu_idx), std::move(sg_idx), sigma_min);
}

}  // namespace quadsim
