// SPDX-License-Identifier: Apache-2.0

#include "core/rng.hpp"

#include <cmath>

namespace quadsim {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

SeededStream::SeededStream(std::uint64_t master_seed, std::string_view label) {
  std::uint64_t mix = master_seed ^ fnv1a64(label);
  for (auto& s : s_) s = splitmix64(mix);
}

std::uint64_t SeededStream::next_u64() {
  // xoshiro256++
  std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double SeededStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededStream::uniform(double lo, double hi) {
  return lo + uniform() * (hi - lo);
}

double SeededStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  if (u1 < 0x1.0p-100) u1 = 0x1.0p-100;
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.28318530717958647692 * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

std::complex<double> SeededStream::cnormal() {
  double re = normal();
  double im = normal();
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  return {re * inv_sqrt2, im * inv_sqrt2};
}

bool SeededStream::bernoulli(double p) { return uniform() < p; }

std::uint64_t SeededStream::below(std::uint64_t n) {
  if (n == 0) return 0;
  // rejection sampling keeps the distribution exactly uniform
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

}  // namespace quadsim
