// SPDX-License-Identifier: Apache-2.0

#include "entropy/model.hpp"

#include <cmath>

#include "core/detmath.hpp"

namespace quadsim {

double quantize_latent(double y_elem, double mu) {
  if (!std::isfinite(y_elem) || !std::isfinite(mu))
    throw Error("quantize_latent: non-finite input");
  return std::round(y_elem - mu) + mu;
}

double likelihood_raw(double y_hat, double mu, double sigma) {
  double d = y_hat - mu;
  return detmath::normal_mass((d - 0.5) / sigma, (d + 0.5) / sigma);
}

double likelihood(double y_hat, double mu, double sigma, double sigma_min) {
  if (sigma < sigma_min) throw Error("likelihood: sigma below sigma_min");
  double p = likelihood_raw(y_hat, mu, sigma);
  return p < kLikelihoodFloor ? kLikelihoodFloor : p;
}

double rate_bits(const LatentGrid& y_hat, const GaussianField& field, double sigma_min) {
  if (y_hat.h_y != field.h_y || y_hat.w_y != field.w_y || y_hat.c_y != field.c_y)
    throw Error("rate_bits: grid/field shape mismatch");
  double bits = 0.0;
  for (std::size_t idx = 0; idx < y_hat.size(); ++idx) {
    double p = likelihood(y_hat.values[idx], field.mu[idx], field.sigma[idx], sigma_min);
    bits -= std::log2(p);
  }
  return bits;
}

PartialLatent::PartialLatent(const CodingSchedule& sched)
    : schedule(&sched), values(sched.h_y(), sched.w_y(), sched.c_y()),
      decoded(static_cast<std::size_t>(sched.h_y()) * sched.w_y() * 4, 0) {}

void PartialLatent::set_group(int i, int j, int group, const double* vals) {
  const int gs = schedule->group_size();
  for (int k = 0; k < gs; ++k) values.at(i, j, group * gs + k) = vals[k];
  decoded[(static_cast<std::size_t>(i) * values.w_y + j) * 4 + group] = 1;
}

GaussianField predict_step_field(const PartialLatent& partial, const HyperStats& hyper,
                                 const CodingSchedule& schedule, int step,
                                 const ContextParams& params) {
  if (hyper.channels() != schedule.c_y())
    throw Error("predict_step_field: hyper channel count mismatch");
  const int gs = schedule.group_size();
  GaussianField field(schedule.h_y(), schedule.w_y(), schedule.c_y());

  for (int i = 0; i < schedule.h_y(); ++i) {
    for (int j = 0; j < schedule.w_y(); ++j) {
      // Pooled residual over every decoded (reference position, channel).
      double rsum = 0.0;
      long rcnt = 0;
      for (auto [dy, dx] : schedule.context_offsets(step)) {
        int ri = i + dy, rj = j + dx;
        if (ri < 0 || ri >= schedule.h_y() || rj < 0 || rj >= schedule.w_y()) continue;
        int rpos = CodingSchedule::position_class(ri, rj);
        for (int g = 0; g < 4; ++g) {
          if (schedule.step_of(g, rpos) >= step) continue;
          if (!partial.is_decoded(ri, rj, g))
            throw Error("predict_step_field: undecoded reference touched");
          for (int k = 0; k < gs; ++k) {
            int c = g * gs + k;
            rsum += partial.values.at(ri, rj, c) - hyper.mu(c);
            ++rcnt;
          }
        }
      }
      double resid = rcnt > 0 ? rsum / static_cast<double>(rcnt) : 0.0;

      int pos = CodingSchedule::position_class(i, j);
      int g = schedule.group_at(step, pos);
      for (int k = 0; k < gs; ++k) {
        int c = g * gs + k;
        std::size_t idx = field.index(i, j, c);
        field.mu[idx] = hyper.mu(c) + params.w_mu[step] * resid;
        field.sigma[idx] =
            std::max(hyper.sigma_min(), hyper.sigma(c) * params.sigma_mult[step]);
      }
    }
  }
  return field;
}

CodingContext::CodingContext(const CodingSchedule& schedule, const HyperStats& hyper,
                             const ContextParams& params)
    : schedule_(&schedule), hyper_(&hyper), params_(params) {
  if (hyper.channels() != schedule.c_y())
    throw Error("CodingContext: hyper channel count mismatch");
  std::size_t n = static_cast<std::size_t>(schedule.h_y()) * schedule.w_y();
  resid_sum_.assign(n, 0.0);
  resid_cnt_.assign(n, 0);
  pending_sum_.assign(n, 0.0);
  pending_cnt_.assign(n, 0);
}

std::pair<double, double> CodingContext::predict(int step, int i, int j, int c) const {
  double rsum = 0.0;
  long rcnt = 0;
  for (auto [dy, dx] : schedule_->context_offsets(step)) {
    int ri = i + dy, rj = j + dx;
    if (ri < 0 || ri >= schedule_->h_y() || rj < 0 || rj >= schedule_->w_y()) continue;
    std::size_t p = static_cast<std::size_t>(ri) * schedule_->w_y() + rj;
    rsum += resid_sum_[p];
    rcnt += resid_cnt_[p];
  }
  double resid = rcnt > 0 ? rsum / static_cast<double>(rcnt) : 0.0;
  double mu = hyper_->mu(c) + params_.w_mu[step] * resid;
  double sigma =
      std::max(hyper_->sigma_min(), hyper_->sigma(c) * params_.sigma_mult[step]);
  return {mu, sigma};
}

void CodingContext::push_decoded(int i, int j, int c, double y_hat) {
  std::size_t p = static_cast<std::size_t>(i) * schedule_->w_y() + j;
  pending_sum_[p] += y_hat - hyper_->mu(c);
  pending_cnt_[p] += 1;
}

void CodingContext::end_step() {
  for (std::size_t p = 0; p < resid_sum_.size(); ++p) {
    resid_sum_[p] += pending_sum_[p];
    resid_cnt_[p] += pending_cnt_[p];
    pending_sum_[p] = 0.0;
    pending_cnt_[p] = 0;
  }
}

std::vector<int> symbol_length_factors(const LatentGrid& y, const GaussianField& field,
                                       double eta, double sigma_min) {
  if (!(eta > 0.0)) throw Error("symbol_length_factors: eta must be > 0");
  if (y.h_y != field.h_y || y.w_y != field.w_y || y.c_y != field.c_y)
    throw Error("symbol_length_factors: shape mismatch");
  std::vector<int> k(static_cast<std::size_t>(y.h_y) * y.w_y);
  for (int i = 0; i < y.h_y; ++i) {
    for (int j = 0; j < y.w_y; ++j) {
      double bits = 0.0;
      for (int c = 0; c < y.c_y; ++c) {
        std::size_t idx = field.index(i, j, c);
        bits -= std::log2(
            likelihood(y.values[idx], field.mu[idx], field.sigma[idx], sigma_min));
      }
      double raw = std::round(eta * bits);
      if (raw < 0.0) raw = 0.0;
      if (raw > y.c_y) raw = y.c_y;
      k[static_cast<std::size_t>(i) * y.w_y + j] = static_cast<int>(raw);
    }
  }
  return k;
}

}  // namespace quadsim
