// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_CORE_DETMATH_HPP
#define QUADSIM_CORE_DETMATH_HPP

namespace quadsim::detmath {

// Deterministic elementary functions built from IEEE-754 +,-,*,/ and sqrt
// only, so results are bit-identical across platforms and libm versions.
// Entropy-coder CDF tables are derived from these; a last-ulp difference in
// a table would make bitstreams undecodable between machines.

// exp(x), classic Sun fdlibm argument reduction + rational kernel.
double exp(double x);

// log(x), fdlibm reduction to [sqrt(2)/2, sqrt(2)) + atanh-style series.
double log(double x);

// Complementary error function, Cody-style rational approximations.
// Absolute error well below 1e-14 over the useful range.
double erfc(double x);

// erf(x) = 1 - erfc(x) with the small-|x| rational form for accuracy.
double erf(double x);

// Standard normal CDF, Phi(x) = erfc(-x / sqrt(2)) / 2.
double normal_cdf(double x);

// P(lo < Z < hi) for standard normal Z, evaluated without cancellation in
// either tail. Requires lo <= hi.
double normal_mass(double lo, double hi);

}  // namespace quadsim::detmath

#endif
