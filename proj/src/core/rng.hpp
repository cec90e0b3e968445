// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_CORE_RNG_HPP
#define QUADSIM_CORE_RNG_HPP

#include <complex>
#include <cstdint>
#include <string_view>

namespace quadsim {

// Deterministic pseudo-random stream keyed by (master seed, label).
// Same pair always yields the same sequence; distinct labels give
// statistically independent streams (label is hashed into the seed).
//
// The generator state is integer-only (xoshiro256++ seeded via splitmix64),
// so the raw u64 stream is reproducible across platforms. Floating-point
// derivations (uniform, gaussian) are deterministic per platform.
//
// Value type: copy one per consumer, never share a stream between threads.
class SeededStream {
 public:
  SeededStream(std::uint64_t master_seed, std::string_view label);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (two draws cached pairwise).
  double normal();

  // Circularly-symmetric complex normal CN(0,1): E|z|^2 = 1.
  std::complex<double> cnormal();

  // Bernoulli(p).
  bool bernoulli(double p);

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// 64-bit FNV-1a, used to fold labels into seeds and to digest config bytes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace quadsim

#endif
