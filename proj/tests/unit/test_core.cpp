// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "core/config.hpp"
#include "core/detmath.hpp"
#include "core/error.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"

using namespace quadsim;

TEST_CASE("derive_latent_dims pads to multiples of 4*block") {
  SystemConfig cfg = SystemConfig::defaults();

  auto d = derive_latent_dims(512, 768, cfg);
  CHECK(d.padded_h == 512);
  CHECK(d.padded_w == 768);
  CHECK(d.h_y == 32);
  CHECK(d.w_y == 48);

  d = derive_latent_dims(1, 1, cfg);
  CHECK(d.padded_h == 64);
  CHECK(d.padded_w == 64);
  CHECK(d.h_y == 4);
  CHECK(d.w_y == 4);

  d = derive_latent_dims(2048, 1890, cfg);
  CHECK(d.padded_h == 2048);
  CHECK(d.padded_w == 1920);
  CHECK(d.h_y == 128);
  CHECK(d.w_y == 120);

  // padded >= input, multiple of 4b, h_y * b == padded_h, h_y even
  for (int h : {1, 13, 64, 65, 100, 511}) {
    for (int w : {1, 7, 63, 128, 1000}) {
      auto dd = derive_latent_dims(h, w, cfg);
      CHECK(dd.padded_h >= h);
      CHECK(dd.padded_w >= w);
      CHECK(dd.padded_h % (4 * cfg.block_size) == 0);
      CHECK(dd.padded_w % (4 * cfg.block_size) == 0);
      CHECK(dd.h_y * cfg.block_size == dd.padded_h);
      CHECK(dd.h_y % 2 == 0);
      CHECK(dd.w_y % 2 == 0);
    }
  }
  CHECK_THROWS_AS(derive_latent_dims(0, 5, cfg), Error);
}

TEST_CASE("validate_config reports every violation") {
  SystemConfig cfg = SystemConfig::defaults();
  CHECK(validate_config(cfg).empty());

  SystemConfig bad = cfg;
  bad.channels_cy = 10;
  auto errs = validate_config(bad);
  bool found = false;
  for (const auto& e : errs)
    if (e.find("C_y not divisible by 4") != std::string::npos) found = true;
  CHECK(found);

  bad = cfg;
  bad.rate_set = {4, 2};
  errs = validate_config(bad);
  found = false;
  for (const auto& e : errs)
    if (e.find("rate_set not increasing") != std::string::npos) found = true;
  CHECK(found);

  bad = cfg;
  bad.eta = 0.0;
  bad.sigma_min = -1.0;
  CHECK(validate_config(bad).size() >= 2);
}

TEST_CASE("seeded streams are deterministic and label-separated") {
  SeededStream a(7, "channel");
  SeededStream b(7, "channel");
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  SeededStream c(7, "channel");
  SeededStream d(7, "noise");
  int differing = 0;
  for (int i = 0; i < 100; ++i)
    if (c.next_u64() != d.next_u64()) ++differing;
  CHECK(differing > 90);

  SeededStream e(7, "x");
  SeededStream f(8, "x");
  differing = 0;
  for (int i = 0; i < 100; ++i)
    if (e.next_u64() != f.next_u64()) ++differing;
  CHECK(differing > 90);
}

TEST_CASE("frozen stream values pin cross-platform reproducibility") {
  // integer-state generator: these values must never drift
  SeededStream s(7, "channel");
  const std::uint64_t expected[4] = {0x2bf9860fc0ac0c84ull, 0x4093ff06e2210948ull,
                                     0x91eaca00b28eb477ull, 0x5d14d91a47e26a44ull};
  for (std::uint64_t e : expected) CHECK(s.next_u64() == e);
  CHECK(fnv1a64("channel") == 11889853325967551908ull);
}

TEST_CASE("stream copies diverge independently from shared state") {
  SeededStream a(42, "s");
  a.next_u64();
  SeededStream b = a;  // value semantics: clone per consumer
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform and normal draws look sane") {
  SeededStream rng(3, "stats");
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::fabs(sum / n) < 0.01);
  CHECK(std::fabs(sum2 / n - 1.0) < 0.02);

  SeededStream u(3, "u");
  for (int i = 0; i < 1000; ++i) {
    double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("config json round trip rejects unknown keys") {
  SystemConfig cfg = SystemConfig::defaults();
  cfg.eta = 0.25;
  cfg.master_seed = 123456789ull;
  SystemConfig back = SystemConfig::from_json(cfg.to_json());
  CHECK(back.eta == cfg.eta);
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(back.rate_set == cfg.rate_set);
  CHECK(back.coding_digest() == cfg.coding_digest());

  CHECK_THROWS_AS(SystemConfig::from_json("{\"blocksize\": 8}"), FormatError);
  CHECK_THROWS_AS(SystemConfig::from_json("not json"), FormatError);
  CHECK_THROWS_AS(SystemConfig::from_json("{\"context\": {\"wmu\": 1}}"), FormatError);

  // changing channels alone re-derives the rate set
  SystemConfig small = SystemConfig::from_json("{\"channels_cy\": 192, \"block_size\": 8}");
  CHECK(small.rate_set.back() == 192);
}

TEST_CASE("deterministic math matches long-double libm oracle") {
  SeededStream rng(11, "detmath");
  long double worst_phi = 0.0L;
  for (int i = 0; i < 200000; ++i) {
    double x = rng.uniform(-40.0, 40.0);
    long double oracle =
        0.5L * erfcl(-static_cast<long double>(x) / std::sqrt(2.0L));
    long double got = detmath::normal_cdf(x);
    worst_phi = std::max(worst_phi, fabsl(got - oracle));
  }
  CHECK(worst_phi < 1e-7L);  // required bound; in practice ~1e-15

  long double worst_exp = 0.0L;
  long double worst_log = 0.0L;
  for (int i = 0; i < 100000; ++i) {
    double x = rng.uniform(-30.0, 30.0);
    long double re = fabsl((detmath::exp(x) - expl(static_cast<long double>(x))) /
                           expl(static_cast<long double>(x)));
    worst_exp = std::max(worst_exp, re);
    double y = rng.uniform(1e-6, 1e6);
    long double rl = fabsl(detmath::log(y) - logl(static_cast<long double>(y)));
    worst_log = std::max(worst_log, rl);
  }
  CHECK(worst_exp < 1e-14L);
  CHECK(worst_log < 1e-13L);
}

TEST_CASE("pnm io and padding") {
  ImagePlane img(3, 5, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(y, x, c) = static_cast<std::uint8_t>(y * 50 + x * 9 + c);

  ImagePlane back = parse_pnm(serialize_pnm(img));
  CHECK(back.samples == img.samples);
  CHECK(back.height == 3);
  CHECK(back.width == 5);

  ImagePlane padded = pad_replicate(img, 6, 8);
  CHECK(padded.at(5, 7, 1) == img.at(2, 4, 1));  // corner replicated
  CHECK(padded.at(0, 7, 2) == img.at(0, 4, 2));
  CHECK(padded.at(5, 0, 0) == img.at(2, 0, 0));
  ImagePlane cropped = crop(padded, 3, 5);
  CHECK(cropped.samples == img.samples);

  // gray roundtrip
  ImagePlane gray(2, 2, 1);
  gray.samples = {10, 20, 30, 40};
  CHECK(parse_pnm(serialize_pnm(gray)).samples == gray.samples);

  CHECK_THROWS_AS(parse_pnm({'P', '4', '\n'}), FormatError);
}
