// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_CHANNEL_CHANNEL_HPP
#define QUADSIM_CHANNEL_CHANNEL_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace quadsim {

using cdouble = std::complex<double>;

enum class ChannelVariant { kAwgn, kRayleigh, kGaussMarkov, kGilbertElliott, kBlockage };

// Channel description; per-variant parameter defaults follow the reference
// operating points used throughout the robustness experiments.
struct ChannelModel {
  ChannelVariant variant = ChannelVariant::kAwgn;

  // gauss_markov
  double rho = 0.97;

  // gilbert_elliott: noise-variance Markov switch over a base channel
  double p_good_to_bad = 0.05;
  double q_bad_to_good = 0.2;
  double erase_prob = 0.01;
  double kappa = 25.0;
  bool ge_rayleigh_base = false;

  // blockage
  double p_block = 0.02;     // LOS dwell mean is (1-p_block)/p_block
  double mean_blocked = 50;  // L_m, mean NLOS run in symbols
  double k_factor_db = 10.0;
  double a_blk_db = 20.0;
  double sigma_shadow = 2.0;

  // Ensemble E|h|^2, used to calibrate noise power against target SNR.
  double analytic_mean_h2() const;

  void validate() const;

  std::string name() const;
  static ChannelModel from_name(const std::string& name);  // default params
  std::string to_json() const;
  static ChannelModel from_json(const std::string& text);
};

// One drawn channel instance. Noise is stored as unit-variance draws and
// scaled inside transmit(), so a realization can be replayed at any SNR.
struct ChannelRealization {
  std::vector<cdouble> h;
  std::vector<cdouble> unit_noise;       // CN(0,1) draws
  std::vector<double> noise_mult;        // variance multiplier (Gilbert-Elliott kappa)
  std::vector<std::uint8_t> erased;      // 1 where the symbol is erased
  std::vector<std::uint8_t> bad_state;   // Gilbert-Elliott state trace

  std::size_t length() const { return h.size(); }
};

ChannelRealization realize(const ChannelModel& model, std::size_t length,
                           std::uint64_t master_seed, const std::string& label = "channel");

// y = h .* s + n, n ~ CN(0, sigma^2 * mult), sigma^2 = E|h|^2 * P / 10^(SNR/10)
// with P = 1 (frames are power-normalized). Erased symbols output 0.
// snr_db = +infinity gives the noiseless channel exactly.
std::vector<cdouble> transmit(const std::vector<cdouble>& s,
                              const ChannelRealization& realization,
                              const ChannelModel& model, double snr_db);

// h_hat = h + e, e ~ CN(0, sigma_e^2), sigma_e^2 = E|h|^2 * 10^(NMSE_dB/10).
// nullopt = perfect CSI (h_hat == h bit-exactly).
std::vector<cdouble> csi_estimate(const ChannelRealization& realization,
                                  const ChannelModel& model,
                                  std::optional<double> nmse_db,
                                  std::uint64_t master_seed,
                                  const std::string& label = "csi");

// s_hat = conj(h_hat) * y / max(|h_hat|^2, g_min^2), g_min = 1e-3.
std::vector<cdouble> zf_equalize(const std::vector<cdouble>& received,
                                 const std::vector<cdouble>& h_hat);

constexpr double kZfGainFloor = 1e-3;

// Empirical statistics of one transmission, for reports and tests.
struct LinkStats {
  double empirical_snr_db = 0.0;  // over counted (non-erased, good-state) symbols
  double measured_nmse_db = 0.0;  // -inf marker -999 when CSI is perfect
};

LinkStats measure_link(const std::vector<cdouble>& sent,
                       const ChannelRealization& realization,
                       const std::vector<cdouble>& received,
                       const std::vector<cdouble>& h_hat, bool perfect_csi);

// Channel trace dump: per symbol f32 Re h, Im h, Re n, Im n, u8 erased (LE),
// where n is the unit-variance draw.
std::vector<std::uint8_t> serialize_trace(const ChannelRealization& r);

}  // namespace quadsim

#endif
