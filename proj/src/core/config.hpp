// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_CORE_CONFIG_HPP
#define QUADSIM_CORE_CONFIG_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace quadsim {

// Analytic context-refinement parameters of the entropy model.
// Step 0 has no context, so w_mu[0] must stay 0.
struct ContextParams {
  std::array<double, 4> w_mu{0.0, 0.5, 0.5, 0.6};
  std::array<double, 4> sigma_mult{1.0, 0.9, 0.9, 0.8};
};

struct LatentDims {
  int padded_h = 0;
  int padded_w = 0;
  int h_y = 0;
  int w_y = 0;
};

// All knobs of the system in one value type. Immutable by convention once
// validated; every pipeline entry point takes it by const reference.
struct SystemConfig {
  int block_size = 16;
  int channels_cy = 768;  // 3 * block_size^2 for image mode
  double eta = 0.1;
  std::vector<int> rate_set;  // sorted distinct values in [0, channels_cy]
  double sigma_min = 0.11;
  double side_link_eff = 2.0;  // C_k, bits per channel use on the side link
  double quant_step = 8.0;     // latent quantization step
  std::uint64_t master_seed = 1;
  ContextParams context;

  static SystemConfig defaults();

  // 8-entry set spanning [0, c_y]: {0, c/32, c/16, c/8, c/4, c/2, 3c/4, c},
  // deduplicated. For c_y = 768 this is {0,24,48,96,192,384,576,768}.
  static std::vector<int> default_rate_set(int c_y);

  // Digest over every parameter that affects coded bytes; embedded in
  // stream headers so a decoder with a different config refuses the stream.
  std::uint32_t coding_digest() const;

  std::string to_json() const;
  static SystemConfig from_json(const std::string& text);
  static SystemConfig from_json_file(const std::string& path);
  void save_json_file(const std::string& path) const;
};

// Every violated invariant, one message each; empty means valid.
std::vector<std::string> validate_config(const SystemConfig& config);

// Throws Error listing all violations unless the config is valid.
void require_valid(const SystemConfig& config);

// Smallest padded dims that are multiples of 4*block_size, and the latent
// grid they induce. Guarantees h_y and w_y even so 2x2 cells tile.
LatentDims derive_latent_dims(int height, int width, const SystemConfig& config);

}  // namespace quadsim

#endif
