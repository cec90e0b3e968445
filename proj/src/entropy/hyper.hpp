// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_ENTROPY_HYPER_HPP
#define QUADSIM_ENTROPY_HYPER_HPP

#include <cstdint>
#include <vector>

#include "core/latent.hpp"

namespace quadsim {

// Per-channel (mu, sigma) statistics standing in for the hyper prior.
// Both live on fixed grids so the values survive a header round trip
// bit-exactly: mu on a 0.1 step, sigma on a 64-level log grid spanning
// [sigma_min, 256].
class HyperStats {
 public:
  static constexpr int kSigmaLevels = 64;
  static constexpr double kSigmaMax = 256.0;
  static constexpr double kMuStep = 0.1;

  HyperStats() = default;
  HyperStats(std::vector<std::int16_t> mu_idx, std::vector<std::uint8_t> sigma_idx,
             double sigma_min);

  int channels() const { return static_cast<int>(mu_idx_.size()); }
  double sigma_min() const { return sigma_min_; }

  std::int16_t mu_index(int c) const { return mu_idx_[c]; }
  std::uint8_t sigma_index(int c) const { return sigma_idx_[c]; }
  double mu(int c) const { return mu_idx_[c] * kMuStep; }
  double sigma(int c) const { return sigma_grid_[sigma_idx_[c]]; }

  // Grid value for a level; exposed for table construction.
  double sigma_grid_value(int level) const { return sigma_grid_[level]; }

  // Nearest grid quantizers.
  static std::int16_t quantize_mu(double mu);
  std::uint8_t quantize_sigma(double sigma) const;

  // Header wire format: u16 channel count, then per channel i16 mu index
  // and u8 sigma index, little-endian.
  void serialize(std::vector<std::uint8_t>& out) const;
  static HyperStats deserialize(const std::vector<std::uint8_t>& in, std::size_t& pos,
                                double sigma_min);

  bool operator==(const HyperStats& o) const {
    return mu_idx_ == o.mu_idx_ && sigma_idx_ == o.sigma_idx_ &&
           sigma_min_ == o.sigma_min_;
  }

 private:
  void build_grid();

  std::vector<std::int16_t> mu_idx_;
  std::vector<std::uint8_t> sigma_idx_;
  double sigma_min_ = 0.11;
  std::vector<double> sigma_grid_;
};

// Grid-quantized per-channel mean and standard deviation of a latent grid.
// Deterministic; zero-variance channels floor to sigma_min.
HyperStats estimate_hyper(const LatentGrid& y, double sigma_min);

}  // namespace quadsim

#endif
