// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_METRICS_METRICS_HPP
#define QUADSIM_METRICS_METRICS_HPP

#include <vector>

#include "core/image.hpp"

namespace quadsim {

// 10*log10(255^2 / MSE) over all channels; identical images cap at 100 dB.
double psnr(const ImagePlane& a, const ImagePlane& b);

// Multi-scale SSIM, up to 5 scales with the canonical weights
// {0.0448, 0.2856, 0.3001, 0.2363, 0.1333} (Wang, Simoncelli, Bovik 2003),
// K1 = 0.01, K2 = 0.03, 11-tap Gaussian window sigma = 1.5, L = 255.
// Images too small for 5 scales use fewer scales with renormalized weights
// (a scale needs min dim >= 11 after downsampling). Channels are averaged.
double ms_ssim(const ImagePlane& a, const ImagePlane& b);

// -10*log10(1 - mean(values)); capped at 100 dB for mean 1.
double msssim_db(const std::vector<double>& values);

struct RdPoint {
  double rate = 0.0;     // bpp or CBR
  double quality = 0.0;  // PSNR dB or MS-SSIM dB
};

// Bjontegaard-style average rate difference of curve_b against curve_a, in
// percent (negative = b cheaper at equal quality). log10-rate is
// interpolated over quality with a monotone piecewise-cubic Hermite fit and
// integrated over the common quality interval. Needs >= 4 points per curve
// and overlapping quality ranges.
double bd_metric(const std::vector<RdPoint>& curve_a, const std::vector<RdPoint>& curve_b);

}  // namespace quadsim

#endif
