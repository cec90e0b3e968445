// SPDX-License-Identifier: Apache-2.0

#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace quadsim {

double psnr(const ImagePlane& a, const ImagePlane& b) {
  if (!a.same_shape(b)) throw Error("psnr: shape mismatch");
  if (a.samples.empty()) throw Error("psnr: empty image");
  double se = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    double d = static_cast<double>(a.samples[i]) - static_cast<double>(b.samples[i]);
    se += d * d;
  }
  double mse = se / static_cast<double>(a.samples.size());
  if (mse <= 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

namespace {

constexpr double kMsssimWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
constexpr int kWin = 11;

struct Plane {
  int h = 0, w = 0;
  std::vector<double> v;
  double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
  double& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
};

std::vector<double> gaussian_window() {
  std::vector<double> g(kWin);
  const double sigma = 1.5;
  double sum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    double x = i - (kWin - 1) / 2.0;
    g[static_cast<std::size_t>(i)] = std::exp(-x * x / (2.0 * sigma * sigma));
    sum += g[static_cast<std::size_t>(i)];
  }
  for (auto& x : g) x /= sum;
  return g;
}

// Separable valid-mode Gaussian filter.
Plane filter_valid(const Plane& p, const std::vector<double>& g) {
  Plane tmp;
  tmp.h = p.h;
  tmp.w = p.w - kWin + 1;
  tmp.v.resize(static_cast<std::size_t>(tmp.h) * tmp.w);
  for (int y = 0; y < tmp.h; ++y)
    for (int x = 0; x < tmp.w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWin; ++k) acc += g[static_cast<std::size_t>(k)] * p.at(y, x + k);
      tmp.at(y, x) = acc;
    }
  Plane out;
  out.h = p.h - kWin + 1;
  out.w = tmp.w;
  out.v.resize(static_cast<std::size_t>(out.h) * out.w);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWin; ++k) acc += g[static_cast<std::size_t>(k)] * tmp.at(y + k, x);
      out.at(y, x) = acc;
    }
  return out;
}

Plane downsample2(const Plane& p) {
  Plane out;
  out.h = p.h / 2;
  out.w = p.w / 2;
  out.v.resize(static_cast<std::size_t>(out.h) * out.w);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x)
      out.at(y, x) = 0.25 * (p.at(2 * y, 2 * x) + p.at(2 * y, 2 * x + 1) +
                             p.at(2 * y + 1, 2 * x) + p.at(2 * y + 1, 2 * x + 1));
  return out;
}

Plane elementwise(const Plane& a, const Plane& b) {
  Plane out = a;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= b.v[i];
  return out;
}

// Mean luminance (l) and contrast-structure (cs) terms at one scale.
std::pair<double, double> ssim_scale(const Plane& a, const Plane& b,
                                     const std::vector<double>& g) {
  Plane mu_a = filter_valid(a, g);
  Plane mu_b = filter_valid(b, g);
  Plane a2 = filter_valid(elementwise(a, a), g);
  Plane b2 = filter_valid(elementwise(b, b), g);
  Plane ab = filter_valid(elementwise(a, b), g);

  double l_sum = 0.0, cs_sum = 0.0;
  std::size_t n = mu_a.v.size();
  for (std::size_t i = 0; i < n; ++i) {
    double ma = mu_a.v[i], mb = mu_b.v[i];
    double va = a2.v[i] - ma * ma;
    double vb = b2.v[i] - mb * mb;
    double cov = ab.v[i] - ma * mb;
    double l = (2.0 * ma * mb + kC1) / (ma * ma + mb * mb + kC1);
    double cs = (2.0 * cov + kC2) / (va + vb + kC2);
    l_sum += l;
    cs_sum += cs;
  }
  return {l_sum / static_cast<double>(n), cs_sum / static_cast<double>(n)};
}

double ms_ssim_plane(Plane a, Plane b) {
  // Number of usable scales: each needs min dim >= window after halving.
  int scales = 0;
  int dim = std::min(a.h, a.w);
  while (scales < 5 && dim >= kWin) {
    ++scales;
    dim /= 2;
  }
  if (scales == 0) throw Error("ms_ssim: image smaller than the filter window");

  double weight_sum = 0.0;
  for (int s = 0; s < scales; ++s) weight_sum += kMsssimWeights[s];

  const auto g = gaussian_window();
  double result = 1.0;
  for (int s = 0; s < scales; ++s) {
    auto [l, cs] = ssim_scale(a, b, g);
    double w = kMsssimWeights[s] / weight_sum;
    double term = (s == scales - 1) ? l * cs : cs;
    term = std::max(term, 0.0);
    result *= std::pow(term, w);
    if (s + 1 < scales) {
      a = downsample2(a);
      b = downsample2(b);
    }
  }
  return std::clamp(result, 0.0, 1.0);
}

}  // namespace

double ms_ssim(const ImagePlane& a, const ImagePlane& b) {
  if (!a.same_shape(b)) throw Error("ms_ssim: shape mismatch");
  double sum = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    Plane pa, pb;
    pa.h = pb.h = a.height;
    pa.w = pb.w = a.width;
    pa.v.resize(a.pixel_count());
    pb.v.resize(a.pixel_count());
    for (int y = 0; y < a.height; ++y)
      for (int x = 0; x < a.width; ++x) {
        pa.at(y, x) = a.at(y, x, c);
        pb.at(y, x) = b.at(y, x, c);
      }
    sum += ms_ssim_plane(std::move(pa), std::move(pb));
  }
  return sum / a.channels;
}

double msssim_db(const std::vector<double>& values) {
  if (values.empty()) throw Error("msssim_db: empty input");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (mean >= 1.0) return 100.0;
  return std::min(100.0, -10.0 * std::log10(1.0 - mean));
}

namespace {

// Monotone (Fritsch-Carlson) piecewise-cubic Hermite interpolant.
struct Pchip {
  std::vector<double> x, y, d;

  Pchip(std::vector<double> xs, std::vector<double> ys)
      : x(std::move(xs)), y(std::move(ys)) {
    std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      if (h[i] <= 0.0) throw Error("bd_metric: quality values must be distinct");
      delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    d.assign(n, 0.0);
    if (n == 2) {
      d[0] = d[1] = delta[0];
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
          d[i] = 0.0;
        } else {
          double w1 = 2.0 * h[i] + h[i - 1];
          double w2 = h[i] + 2.0 * h[i - 1];
          d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
      }
      d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
      d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
  }

  static double edge_slope(double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::fabs(s) > 3.0 * std::fabs(d0)) return 3.0 * d0;
    return s;
  }

  // Integral over [lo, hi] within the data range.
  double integrate(double lo, double hi) const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      double a = std::max(lo, x[i]);
      double b = std::min(hi, x[i + 1]);
      if (b <= a) continue;
      total += segment_integral(i, a, b);
    }
    return total;
  }

 private:
  // Exact integral of the cubic Hermite segment i over [a, b].
  double segment_integral(std::size_t i, double a, double b) const {
    double h = x[i + 1] - x[i];
    auto antiderivative = [&](double xx) {
      double t = (xx - x[i]) / h;
      double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
      // Integrals of the Hermite basis functions over [0, t], scaled by h.
      double ih00 = t - t3 + 0.5 * t4;
      double ih10 = 0.5 * t2 - (2.0 / 3.0) * t3 + 0.25 * t4;
      double ih01 = t3 - 0.5 * t4;
      double ih11 = -(1.0 / 3.0) * t3 + 0.25 * t4;
      return h * (y[i] * ih00 + h * d[i] * ih10 + y[i + 1] * ih01 + h * d[i + 1] * ih11);
    };
    return antiderivative(b) - antiderivative(a);
  }
};

std::pair<std::vector<double>, std::vector<double>> sorted_log_curve(
    const std::vector<RdPoint>& curve) {
  if (curve.size() < 4) throw Error("bd_metric: need at least 4 points per curve");
  std::vector<RdPoint> pts = curve;
  std::sort(pts.begin(), pts.end(),
            [](const RdPoint& a, const RdPoint& b) { return a.quality < b.quality; });
  std::vector<double> q, lr;
  for (const auto& p : pts) {
    if (!(p.rate > 0.0)) throw Error("bd_metric: rates must be positive");
    q.push_back(p.quality);
    lr.push_back(std::log10(p.rate));
  }
  return {q, lr};
}

}  // namespace

double bd_metric(const std::vector<RdPoint>& curve_a, const std::vector<RdPoint>& curve_b) {
  auto [qa, la] = sorted_log_curve(curve_a);
  auto [qb, lb] = sorted_log_curve(curve_b);
  double lo = std::max(qa.front(), qb.front());
  double hi = std::min(qa.back(), qb.back());
  if (!(hi > lo)) throw Error("bd_metric: no quality overlap between curves");
  Pchip fa(qa, la), fb(qb, lb);
  double avg = (fb.integrate(lo, hi) - fa.integrate(lo, hi)) / (hi - lo);
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

}  // namespace quadsim
