// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_ENTROPY_MODEL_HPP
#define QUADSIM_ENTROPY_MODEL_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "core/config.hpp"
#include "core/latent.hpp"
#include "entropy/hyper.hpp"
#include "quadtree/schedule.hpp"

namespace quadsim {

// Tail-mass floor: every symbol stays codable by a 16-bit range coder.
constexpr double kLikelihoodFloor = 0x1.0p-16;

// Per-element (mu, sigma) aligned with a latent grid.
struct GaussianField {
  int h_y = 0, w_y = 0, c_y = 0;
  std::vector<double> mu;
  std::vector<double> sigma;

  GaussianField() = default;
  GaussianField(int h, int w, int c)
      : h_y(h), w_y(w), c_y(c),
        mu(static_cast<std::size_t>(h) * w * c, 0.0),
        sigma(static_cast<std::size_t>(h) * w * c, 0.0) {}

  std::size_t index(int i, int j, int c) const {
    return (static_cast<std::size_t>(i) * w_y + j) * c_y + c;
  }
};

// Mean-offset quantization: round the residual half away from zero, add the
// mean back. |result - y| <= 0.5. Throws on non-finite input.
double quantize_latent(double y_elem, double mu);

// Mass of the width-1 bin centered on y_hat under N(mu, sigma^2) convolved
// with U(-1/2, 1/2), i.e. Phi((d+0.5)/sigma) - Phi((d-0.5)/sigma) for
// d = y_hat - mu. `likelihood` floors at kLikelihoodFloor; the raw variant
// is exposed for normalization checks.
double likelihood(double y_hat, double mu, double sigma, double sigma_min);
double likelihood_raw(double y_hat, double mu, double sigma);

// Sum over elements of -log2 likelihood. Non-negative, additive.
double rate_bits(const LatentGrid& y_hat, const GaussianField& field, double sigma_min);

// Latent grid under progressive decode: values plus a per-(position, group)
// decoded mask. predict_step_field reads only decoded coordinates.
struct PartialLatent {
  explicit PartialLatent(const CodingSchedule& schedule);

  const CodingSchedule* schedule;
  LatentGrid values;
  std::vector<std::uint8_t> decoded;  // (i * w + j) * 4 + group

  bool is_decoded(int i, int j, int group) const {
    return decoded[(static_cast<std::size_t>(i) * values.w_y + j) * 4 + group] != 0;
  }
  // Stores one group's worth of values at (i, j) and marks it decoded.
  void set_group(int i, int j, int group, const double* vals);
};

// Context-refined parameters for every element coded at `step`:
//   mu    = mu_c + w_mu[step] * mean(decoded residuals over references)
//   sigma = max(sigma_min, sigma_c * sigma_mult[step])
// Returned as a full-grid field with entries only at this step's
// coordinates (others zero). Throws if a needed reference group is not
// decoded yet.
GaussianField predict_step_field(const PartialLatent& partial, const HyperStats& hyper,
                                 const CodingSchedule& schedule, int step,
                                 const ContextParams& params);

// Incremental form of the same prediction used by the codecs: per-position
// residual accumulators updated one step at a time. Encoder and decoder run
// the identical updates, which is what keeps their fields bit-exact.
class CodingContext {
 public:
  CodingContext(const CodingSchedule& schedule, const HyperStats& hyper,
                const ContextParams& params);

  // (mu, sigma) for element (i, j, c) coded at `step`.
  std::pair<double, double> predict(int step, int i, int j, int c) const;

  // Record a decoded value; visible to predictions from the NEXT step only
  // after end_step().
  void push_decoded(int i, int j, int c, double y_hat);
  void end_step();

  const CodingSchedule& schedule() const { return *schedule_; }
  const HyperStats& hyper() const { return *hyper_; }

 private:
  const CodingSchedule* schedule_;
  const HyperStats* hyper_;
  ContextParams params_;
  std::vector<double> resid_sum_;      // per position, committed steps
  std::vector<std::int32_t> resid_cnt_;
  std::vector<double> pending_sum_;    // current step, not yet visible
  std::vector<std::int32_t> pending_cnt_;
};

// Raw symbol-length factors: k[i][j] = round(sum_c -eta*log2 p(y_ijc)),
// clamped to [0, c_y]. Evaluated at the continuous y (the analog path
// transmits unquantized features).
std::vector<int> symbol_length_factors(const LatentGrid& y, const GaussianField& field,
                                       double eta, double sigma_min);

}  // namespace quadsim

#endif
