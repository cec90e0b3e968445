// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"
#include "core/error.hpp"
#include "metrics/metrics.hpp"

using namespace quadsim;

TEST_CASE("psnr: caps, exact values, symmetry") {
  ImagePlane a(16, 16, 3, 100);
  CHECK(psnr(a, a) == 100.0);

  ImagePlane zero(16, 16, 3, 0);
  ImagePlane full(16, 16, 3, 255);
  CHECK(psnr(zero, full) == doctest::Approx(0.0).epsilon(1e-9));

  // every sample off by one: MSE = 1 -> 20*log10(255) = 48.1308
  ImagePlane b = a;
  for (auto& s : b.samples) s = 101;
  CHECK(psnr(a, b) == doctest::Approx(48.1308).epsilon(1e-4));
  CHECK(psnr(a, b) == psnr(b, a));

  ImagePlane small(8, 8, 3, 0);
  CHECK_THROWS_AS(psnr(a, small), Error);
}

TEST_CASE("ms_ssim: identity, range, degradation ordering") {
  SeededStream rng(71, "ms");
  ImagePlane a(160, 160, 3);
  for (auto& s : a.samples) s = static_cast<std::uint8_t>(rng.below(256));
  CHECK(ms_ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));

  ImagePlane noisy = a;
  SeededStream rng2(72, "ms2");
  for (auto& s : noisy.samples) {
    int v = s + static_cast<int>(rng2.below(21)) - 10;
    s = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
  }
  double m_noisy = ms_ssim(a, noisy);
  CHECK(m_noisy < 1.0);
  CHECK(m_noisy >= 0.0);

  ImagePlane very_noisy(160, 160, 3);
  for (auto& s : very_noisy.samples) s = static_cast<std::uint8_t>(rng.below(256));
  double m_bad = ms_ssim(a, very_noisy);
  CHECK(m_bad < m_noisy);
  CHECK(m_bad >= 0.0);

  // fuzzed pairs stay in [0, 1]
  for (int t = 0; t < 5; ++t) {
    ImagePlane x(48, 40, 1), y(48, 40, 1);
    for (auto& s : x.samples) s = static_cast<std::uint8_t>(rng.below(256));
    for (auto& s : y.samples) s = static_cast<std::uint8_t>(rng.below(256));
    double v = ms_ssim(x, y);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  // small images fall back to fewer scales instead of failing
  ImagePlane tiny(24, 24, 3, 60);
  CHECK(ms_ssim(tiny, tiny) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("msssim_db conversion") {
  CHECK(msssim_db({1.0}) == 100.0);
  CHECK(msssim_db({0.9}) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(msssim_db({0.99}) == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(msssim_db({0.9, 0.99}) ==
        doctest::Approx(-10.0 * std::log10(1.0 - 0.945)).epsilon(1e-9));
}

TEST_CASE("bd_metric: scaling, self-comparison, analytic curves") {
  std::vector<RdPoint> a = {{0.10, 30.0}, {0.20, 33.0}, {0.40, 36.0}, {0.80, 39.0}};
  std::vector<RdPoint> b;
  for (const auto& p : a) b.push_back({p.rate * 0.9, p.quality});

  CHECK(bd_metric(a, b) == doctest::Approx(-10.0).epsilon(0.001));
  CHECK(bd_metric(a, a) == doctest::Approx(0.0).epsilon(1e-9));

  // log-linear curves with different slopes: closed-form average offset
  std::vector<RdPoint> c, d;
  for (double q : {30.0, 32.0, 34.0, 36.0, 38.0}) {
    c.push_back({std::pow(10.0, 0.05 * q - 2.2), q});
    d.push_back({std::pow(10.0, 0.06 * q - 2.5), q});
  }
  // mean of (0.01 q - 0.3) over [30, 38] = 0.01*34 - 0.3 = 0.04
  double expect = (std::pow(10.0, 0.04) - 1.0) * 100.0;
  CHECK(bd_metric(c, d) == doctest::Approx(expect).epsilon(0.005));

  // antisymmetry within 0.2 percentage points on nearby smooth curves
  std::vector<RdPoint> e;
  for (const auto& p : c) e.push_back({p.rate * (1.0 + 0.0005 * p.quality), p.quality});
  double fwd = bd_metric(c, e);
  double rev = bd_metric(e, c);
  CHECK(std::fabs(fwd) > 0.5);  // the comparison is not degenerate
  CHECK(std::fabs(fwd + rev) <= 0.2);

  CHECK_THROWS_AS(bd_metric({{0.1, 30.0}, {0.2, 33.0}}, a), Error);
  std::vector<RdPoint> disjoint = {{0.1, 50.0}, {0.2, 53.0}, {0.4, 56.0}, {0.8, 59.0}};
  CHECK_THROWS_AS(bd_metric(a, disjoint), Error);
}
