// SPDX-License-Identifier: Apache-2.0

#include "core/config.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace quadsim {

using nlohmann::json;

SystemConfig SystemConfig::defaults() {
  SystemConfig c;
  c.rate_set = default_rate_set(c.channels_cy);
  return c;
}

std::vector<int> SystemConfig::default_rate_set(int c_y) {
  std::set<int> s{0,          c_y / 32, c_y / 16,     c_y / 8,
                  c_y / 4,    c_y / 2,  3 * c_y / 4,  c_y};
  return {s.begin(), s.end()};
}

std::uint32_t SystemConfig::coding_digest() const {
  std::string blob;
  auto put_i64 = [&](std::int64_t v) {
    char b[8];
    std::memcpy(b, &v, 8);
    blob.append(b, 8);
  };
  auto put_f64 = [&](double v) {
    char b[8];
    std::memcpy(b, &v, 8);
    blob.append(b, 8);
  };
  put_i64(block_size);
  put_i64(channels_cy);
  put_f64(quant_step);
  put_f64(sigma_min);
  for (double w : context.w_mu) put_f64(w);
  for (double m : context.sigma_mult) put_f64(m);
  return static_cast<std::uint32_t>(fnv1a64(blob) & 0xFFFFFFFFu);
}

std::string SystemConfig::to_json() const {
  json j;
  j["block_size"] = block_size;
  j["channels_cy"] = channels_cy;
  j["eta"] = eta;
  j["rate_set"] = rate_set;
  j["sigma_min"] = sigma_min;
  j["side_link_eff"] = side_link_eff;
  j["quant_step"] = quant_step;
  j["master_seed"] = master_seed;
  j["context"] = {{"w_mu", context.w_mu}, {"sigma_mult", context.sigma_mult}};
  return j.dump(2);
}

namespace {

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw FormatError("config: unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

}  // namespace

SystemConfig SystemConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("config: top level must be an object");
  reject_unknown_keys(j,
                      {"block_size", "channels_cy", "eta", "rate_set",
                       "sigma_min", "side_link_eff", "quant_step",
                       "master_seed", "context"},
                      "top level");

  SystemConfig c = defaults();
  bool rate_set_given = false;
  bool channels_given = false;
  try {
    if (j.contains("block_size")) c.block_size = j["block_size"].get<int>();
    if (j.contains("channels_cy")) {
      c.channels_cy = j["channels_cy"].get<int>();
      channels_given = true;
    }
    if (j.contains("eta")) c.eta = j["eta"].get<double>();
    if (j.contains("rate_set")) {
      c.rate_set = j["rate_set"].get<std::vector<int>>();
      rate_set_given = true;
    }
    if (j.contains("sigma_min")) c.sigma_min = j["sigma_min"].get<double>();
    if (j.contains("side_link_eff")) c.side_link_eff = j["side_link_eff"].get<double>();
    if (j.contains("quant_step")) c.quant_step = j["quant_step"].get<double>();
    if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("context")) {
      const json& ctx = j["context"];
      reject_unknown_keys(ctx, {"w_mu", "sigma_mult"}, "context");
      if (ctx.contains("w_mu")) c.context.w_mu = ctx["w_mu"].get<std::array<double, 4>>();
      if (ctx.contains("sigma_mult"))
        c.context.sigma_mult = ctx["sigma_mult"].get<std::array<double, 4>>();
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: bad value type: ") + e.what());
  }
  if (channels_given && !rate_set_given) c.rate_set = default_rate_set(c.channels_cy);
  return c;
}

SystemConfig SystemConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void SystemConfig::save_json_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("config: cannot write " + path);
  out << to_json() << "\n";
}

std::vector<std::string> validate_config(const SystemConfig& c) {
  std::vector<std::string> errs;
  if (c.block_size < 1) errs.push_back("block_size must be >= 1");
  if (c.block_size > 255) errs.push_back("block_size exceeds the 8-bit header field");
  if (c.channels_cy < 4) errs.push_back("channels_cy must be >= 4");
  if (c.channels_cy > 65535) errs.push_back("channels_cy exceeds the 16-bit header field");
  if (c.channels_cy % 4 != 0) errs.push_back("C_y not divisible by 4");
  if (!(c.eta > 0.0)) errs.push_back("eta must be > 0");
  if (!(c.sigma_min > 0.0)) errs.push_back("sigma_min must be > 0");
  if (!(c.quant_step > 0.0)) errs.push_back("quant_step must be > 0");
  if (!(c.side_link_eff > 0.0)) errs.push_back("side_link_eff must be > 0");
  if (c.rate_set.empty()) errs.push_back("rate_set must be non-empty");
  for (std::size_t i = 0; i + 1 < c.rate_set.size(); ++i) {
    if (c.rate_set[i] >= c.rate_set[i + 1]) {
      errs.push_back("rate_set not increasing");
      break;
    }
  }
  for (int k : c.rate_set) {
    if (k < 0 || k > c.channels_cy) {
      errs.push_back("rate_set value out of [0, C_y]");
      break;
    }
  }
  if (c.context.w_mu[0] != 0.0) errs.push_back("context.w_mu[0] must be 0");
  for (double m : c.context.sigma_mult) {
    if (!(m > 0.0 && m <= 1.0)) {
      errs.push_back("context.sigma_mult entries must be in (0, 1]");
      break;
    }
  }
  return errs;
}

void require_valid(const SystemConfig& config) {
  auto errs = validate_config(config);
  if (errs.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& e : errs) msg += " " + e + ";";
  throw Error(msg);
}

LatentDims derive_latent_dims(int height, int width, const SystemConfig& config) {
  if (height < 1 || width < 1) throw Error("derive_latent_dims: dims must be >= 1");
  if (config.block_size < 1) throw Error("derive_latent_dims: bad block_size");
  const int unit = 4 * config.block_size;
  LatentDims d;
  d.padded_h = ((height + unit - 1) / unit) * unit;
  d.padded_w = ((width + unit - 1) / unit) * unit;
  d.h_y = d.padded_h / config.block_size;
  d.w_y = d.padded_w / config.block_size;
  return d;
}

}  // namespace quadsim
