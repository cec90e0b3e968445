// SPDX-License-Identifier: Apache-2.0

#include "channel/channel.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include <json.hpp>

#include "core/error.hpp"

namespace quadsim {

using nlohmann::json;

void ChannelModel::validate() const {
  switch (variant) {
    case ChannelVariant::kGaussMarkov:
      if (!(rho >= 0.0 && rho < 1.0)) throw Error("channel: rho must be in [0,1)");
      break;
    case ChannelVariant::kGilbertElliott:
      if (!(p_good_to_bad >= 0.0 && p_good_to_bad <= 1.0) ||
          !(q_bad_to_good >= 0.0 && q_bad_to_good <= 1.0) ||
          !(erase_prob >= 0.0 && erase_prob <= 1.0))
        throw Error("channel: Gilbert-Elliott probabilities must be in [0,1]");
      if (!(kappa >= 1.0)) throw Error("channel: kappa must be >= 1");
      break;
    case ChannelVariant::kBlockage:
      if (!(p_block > 0.0 && p_block < 1.0)) throw Error("channel: p_block must be in (0,1)");
      if (!(mean_blocked >= 1.0)) throw Error("channel: mean blocked length must be >= 1");
      if (!std::isfinite(k_factor_db) || !std::isfinite(a_blk_db))
        throw Error("channel: K and A_blk must be finite");
      if (!(sigma_shadow >= 0.0)) throw Error("channel: sigma_shadow must be >= 0");
      break;
    default:
      break;
  }
}

double ChannelModel::analytic_mean_h2() const {
  switch (variant) {
    case ChannelVariant::kAwgn:
      return 1.0;
    case ChannelVariant::kRayleigh:
    case ChannelVariant::kGaussMarkov:
      return 1.0;
    case ChannelVariant::kGilbertElliott:
      return 1.0;  // base channel is AWGN or Rayleigh, both unit power
    case ChannelVariant::kBlockage: {
      double mean_los = (1.0 - p_block) / p_block;
      double att2 = std::pow(10.0, -a_blk_db / 10.0);
      double ln10_over10 = std::log(10.0) / 10.0;
      double shadow2 = std::exp(0.5 * sigma_shadow * sigma_shadow * ln10_over10 * ln10_over10);
      double nlos_h2 = att2 * shadow2;
      return (mean_los * 1.0 + mean_blocked * nlos_h2) / (mean_los + mean_blocked);
    }
  }
  throw Error("channel: unknown variant");
}

std::string ChannelModel::name() const {
  switch (variant) {
    case ChannelVariant::kAwgn: return "awgn";
    case ChannelVariant::kRayleigh: return "rayleigh";
    case ChannelVariant::kGaussMarkov: return "gauss-markov";
    case ChannelVariant::kGilbertElliott: return "gilbert-elliott";
    case ChannelVariant::kBlockage: return "blockage";
  }
  return "?";
}

ChannelModel ChannelModel::from_name(const std::string& name) {
  ChannelModel m;
  if (name == "awgn") {
    m.variant = ChannelVariant::kAwgn;
  } else if (name == "rayleigh") {
    m.variant = ChannelVariant::kRayleigh;
  } else if (name == "gauss-markov") {
    m.variant = ChannelVariant::kGaussMarkov;
  } else if (name == "gilbert-elliott") {
    m.variant = ChannelVariant::kGilbertElliott;
  } else if (name == "blockage") {
    m.variant = ChannelVariant::kBlockage;
  } else {
    throw Error("channel: unknown variant \"" + name + "\"");
  }
  return m;
}

std::string ChannelModel::to_json() const {
  json j;
  j["variant"] = name();
  switch (variant) {
    case ChannelVariant::kGaussMarkov:
      j["rho"] = rho;
      break;
    case ChannelVariant::kGilbertElliott:
      j["p"] = p_good_to_bad;
      j["q"] = q_bad_to_good;
      j["erase_prob"] = erase_prob;
      j["kappa"] = kappa;
      j["rayleigh_base"] = ge_rayleigh_base;
      break;
    case ChannelVariant::kBlockage:
      j["p_block"] = p_block;
      j["mean_blocked"] = mean_blocked;
      j["k_factor_db"] = k_factor_db;
      j["a_blk_db"] = a_blk_db;
      j["sigma_shadow"] = sigma_shadow;
      break;
    default:
      break;
  }
  return j.dump();
}

ChannelModel ChannelModel::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("channel: invalid JSON: ") + e.what());
  }
  if (j.is_string()) return from_name(j.get<std::string>());
  if (!j.is_object() || !j.contains("variant"))
    throw FormatError("channel: expected {\"variant\": ...}");
  ChannelModel m = from_name(j["variant"].get<std::string>());
  try {
    if (j.contains("rho")) m.rho = j["rho"].get<double>();
    if (j.contains("p")) m.p_good_to_bad = j["p"].get<double>();
    if (j.contains("q")) m.q_bad_to_good = j["q"].get<double>();
    if (j.contains("erase_prob")) m.erase_prob = j["erase_prob"].get<double>();
    if (j.contains("kappa")) m.kappa = j["kappa"].get<double>();
    if (j.contains("rayleigh_base")) m.ge_rayleigh_base = j["rayleigh_base"].get<bool>();
    if (j.contains("p_block")) m.p_block = j["p_block"].get<double>();
    if (j.contains("mean_blocked")) m.mean_blocked = j["mean_blocked"].get<double>();
    if (j.contains("k_factor_db")) m.k_factor_db = j["k_factor_db"].get<double>();
    if (j.contains("a_blk_db")) m.a_blk_db = j["a_blk_db"].get<double>();
    if (j.contains("sigma_shadow")) m.sigma_shadow = j["sigma_shadow"].get<double>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("channel: bad parameter: ") + e.what());
  }
  m.validate();
  return m;
}

namespace {

// Geometric run length with mean 1/theta, support {1, 2, ...}.
std::size_t geometric_run(SeededStream& rng, double theta) {
  double u = rng.uniform();
  if (u < 1e-300) u = 1e-300;
  double len = std::floor(std::log(u) / std::log(1.0 - theta)) + 1.0;
  if (len < 1.0) len = 1.0;
  if (len > 1e9) len = 1e9;
  return static_cast<std::size_t>(len);
}

}  // namespace

ChannelRealization realize(const ChannelModel& model, std::size_t length,
                           std::uint64_t master_seed, const std::string& label) {
  model.validate();
  ChannelRealization r;
  r.h.resize(length);
  r.unit_noise.resize(length);
  r.noise_mult.assign(length, 1.0);
  r.erased.assign(length, 0);

  SeededStream h_rng(master_seed, label + "/h");
  SeededStream n_rng(master_seed, label + "/noise");
  SeededStream s_rng(master_seed, label + "/state");

  for (auto& n : r.unit_noise) n = n_rng.cnormal();

  switch (model.variant) {
    case ChannelVariant::kAwgn: {
      for (auto& h : r.h) h = 1.0;
      break;
    }
    case ChannelVariant::kRayleigh: {
      for (auto& h : r.h) h = h_rng.cnormal();
      break;
    }
    case ChannelVariant::kGaussMarkov: {
      double alpha = std::sqrt(1.0 - model.rho * model.rho);
      cdouble prev = h_rng.cnormal();  // stationary start
      for (std::size_t k = 0; k < length; ++k) {
        if (k > 0) prev = model.rho * prev + alpha * h_rng.cnormal();
        r.h[k] = prev;
      }
      break;
    }
    case ChannelVariant::kGilbertElliott: {
      r.bad_state.assign(length, 0);
      double pi_bad = model.p_good_to_bad + model.q_bad_to_good > 0.0
                          ? model.p_good_to_bad /
                                (model.p_good_to_bad + model.q_bad_to_good)
                          : 0.0;
      bool bad = s_rng.bernoulli(pi_bad);
      for (std::size_t k = 0; k < length; ++k) {
        r.bad_state[k] = bad ? 1 : 0;
        r.noise_mult[k] = bad ? model.kappa : 1.0;
        if (bad && s_rng.bernoulli(model.erase_prob)) r.erased[k] = 1;
        r.h[k] = model.ge_rayleigh_base ? h_rng.cnormal() : cdouble{1.0, 0.0};
        bad = bad ? !s_rng.bernoulli(model.q_bad_to_good)
                  : s_rng.bernoulli(model.p_good_to_bad);
      }
      break;
    }
    case ChannelVariant::kBlockage: {
      r.bad_state.assign(length, 0);
      double k_lin = std::pow(10.0, model.k_factor_db / 10.0);
      double mu = std::sqrt(k_lin / (k_lin + 1.0));
      double sigma_s = std::sqrt(1.0 / (k_lin + 1.0));
      double att = std::pow(10.0, -model.a_blk_db / 20.0);
      double mean_los = (1.0 - model.p_block) / model.p_block;
      double theta_los = 1.0 / mean_los;
      double theta_nlos = 1.0 / model.mean_blocked;

      double pi_nlos = model.mean_blocked / (model.mean_blocked + mean_los);
      bool blocked = s_rng.bernoulli(pi_nlos);
      std::size_t run = geometric_run(s_rng, blocked ? theta_nlos : theta_los);
      for (std::size_t k = 0; k < length; ++k) {
        if (run == 0) {
          blocked = !blocked;
          run = geometric_run(s_rng, blocked ? theta_nlos : theta_los);
        }
        --run;
        if (blocked) {
          r.bad_state[k] = 1;
          double shadow = std::pow(10.0, s_rng.normal() * model.sigma_shadow / 20.0);
          r.h[k] = h_rng.cnormal() * att * shadow;
        } else {
          r.h[k] = mu + sigma_s * h_rng.cnormal();
        }
      }
      break;
    }
  }
  return r;
}

std::vector<cdouble> transmit(const std::vector<cdouble>& s,
                              const ChannelRealization& realization,
                              const ChannelModel& model, double snr_db) {
  if (s.size() != realization.length()) throw Error("transmit: length mismatch");
  double sigma2 = 0.0;
  if (!std::isinf(snr_db)) {
    sigma2 = model.analytic_mean_h2() / std::pow(10.0, snr_db / 10.0);
  }
  double sigma = std::sqrt(sigma2);
  std::vector<cdouble> y(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (realization.erased[k]) {
      y[k] = 0.0;
      continue;
    }
    double sk = sigma * std::sqrt(realization.noise_mult[k]);
    y[k] = realization.h[k] * s[k] + sk * realization.unit_noise[k];
  }
  return y;
}

std::vector<cdouble> csi_estimate(const ChannelRealization& realization,
                                  const ChannelModel& model,
                                  std::optional<double> nmse_db,
                                  std::uint64_t master_seed, const std::string& label) {
  if (!nmse_db.has_value()) return realization.h;
  if (!std::isfinite(*nmse_db)) throw Error("csi_estimate: NMSE must be finite");
  double sigma_e2 = model.analytic_mean_h2() * std::pow(10.0, *nmse_db / 10.0);
  double sigma_e = std::sqrt(sigma_e2);
  SeededStream rng(master_seed, label);
  std::vector<cdouble> h_hat(realization.length());
  for (std::size_t k = 0; k < h_hat.size(); ++k)
    h_hat[k] = realization.h[k] + sigma_e * rng.cnormal();
  return h_hat;
}

std::vector<cdouble> zf_equalize(const std::vector<cdouble>& received,
                                 const std::vector<cdouble>& h_hat) {
  if (received.size() != h_hat.size()) throw Error("zf_equalize: length mismatch");
  std::vector<cdouble> s_hat(received.size());
  constexpr double floor2 = kZfGainFloor * kZfGainFloor;
  for (std::size_t k = 0; k < received.size(); ++k) {
    double g2 = std::norm(h_hat[k]);
    s_hat[k] = std::conj(h_hat[k]) * received[k] / std::max(g2, floor2);
  }
  return s_hat;
}

LinkStats measure_link(const std::vector<cdouble>& sent,
                       const ChannelRealization& realization,
                       const std::vector<cdouble>& received,
                       const std::vector<cdouble>& h_hat, bool perfect_csi) {
  LinkStats st;
  double sig = 0.0, noise = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 0; k < sent.size(); ++k) {
    // erased or noise-inflated symbols are excluded: the SNR target is
    // defined against the good-state noise floor
    if (realization.erased[k] || realization.noise_mult[k] != 1.0) continue;
    cdouble hs = realization.h[k] * sent[k];
    sig += std::norm(hs);
    noise += std::norm(received[k] - hs);
    ++counted;
  }
  st.empirical_snr_db =
      (counted > 0 && noise > 0.0) ? 10.0 * std::log10(sig / noise)
                                   : std::numeric_limits<double>::infinity();
  if (perfect_csi) {
    st.measured_nmse_db = -999.0;
  } else {
    double eh = 0.0, ee = 0.0;
    for (std::size_t k = 0; k < h_hat.size(); ++k) {
      eh += std::norm(realization.h[k]);
      ee += std::norm(h_hat[k] - realization.h[k]);
    }
    st.measured_nmse_db = ee > 0.0 && eh > 0.0 ? 10.0 * std::log10(ee / eh) : -999.0;
  }
  return st;
}

std::vector<std::uint8_t> serialize_trace(const ChannelRealization& r) {
  std::vector<std::uint8_t> out;
  out.reserve(r.length() * 17);
  auto put_f32 = [&](float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int i = 0; i < 4; ++i)
      out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
  };
  for (std::size_t k = 0; k < r.length(); ++k) {
    put_f32(static_cast<float>(r.h[k].real()));
    put_f32(static_cast<float>(r.h[k].imag()));
    put_f32(static_cast<float>(r.unit_noise[k].real()));
    put_f32(static_cast<float>(r.unit_noise[k].imag()));
    out.push_back(r.erased[k]);
  }
  return out;
}

}  // namespace quadsim
