// SPDX-License-Identifier: Apache-2.0

#include "core/detmath.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace quadsim::detmath {

namespace {

// fdlibm e_exp.c constants.
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kInvLn2 = 1.44269504088896338700e+00;
constexpr double kExpP1 = 1.66666666666666019037e-01;
constexpr double kExpP2 = -2.77777777770155933842e-03;
constexpr double kExpP3 = 6.61375632143793436117e-05;
constexpr double kExpP4 = -1.65339022054652515390e-06;
constexpr double kExpP5 = 4.13813679705723846039e-08;

// fdlibm e_log.c constants.
constexpr double kLg1 = 6.666666666666735130e-01;
constexpr double kLg2 = 3.999999999940941908e-01;
constexpr double kLg3 = 2.857142874366239149e-01;
constexpr double kLg4 = 2.222219843214978396e-01;
constexpr double kLg5 = 1.818357216161805012e-01;
constexpr double kLg6 = 1.531383769920937332e-01;
constexpr double kLg7 = 1.479819860511658591e-01;
constexpr double kSqrt2 = 1.41421356237309514547;

}  // namespace

double exp(double x) {
  if (std::isnan(x)) return x;
  if (x > 709.782712893383996843) return std::numeric_limits<double>::infinity();
  if (x < -745.133219101941108420) return 0.0;
  if (x == 0.0) return 1.0;

  // x = k*ln2 + r, |r| <= 0.5*ln2
  int k = static_cast<int>(x < 0 ? kInvLn2 * x - 0.5 : kInvLn2 * x + 0.5);
  double kd = static_cast<double>(k);
  double hi = x - kd * kLn2Hi;
  double lo = kd * kLn2Lo;
  double r = hi - lo;

  double t = r * r;
  double c = r - t * (kExpP1 + t * (kExpP2 + t * (kExpP3 + t * (kExpP4 + t * kExpP5))));
  double y = 1.0 - ((lo - (r * c) / (2.0 - c)) - hi);
  return std::ldexp(y, k);
}

double log(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return x;

  // x = 2^e * m, m in [1, 2); shift m into [sqrt(2)/2, sqrt(2)).
  int e = 0;
  double m = std::frexp(x, &e);  // m in [0.5, 1)
  m *= 2.0;
  e -= 1;
  if (m > kSqrt2) {
    m *= 0.5;
    e += 1;
  }

  double f = m - 1.0;
  double s = f / (2.0 + f);
  double z = s * s;
  double w = z * z;
  double t1 = w * (kLg2 + w * (kLg4 + w * kLg6));
  double t2 = z * (kLg1 + w * (kLg3 + w * (kLg5 + w * kLg7)));
  double r = t1 + t2;
  double hfsq = 0.5 * f * f;
  double ed = static_cast<double>(e);
  return ed * kLn2Hi - ((hfsq - (s * (hfsq + r) + ed * kLn2Lo)) - f);
}

namespace {

// Cody, "Rational Chebyshev approximation of the error function",
// the SPECFUN coefficient sets.
constexpr double kErfA[5] = {3.16112374387056560e+00, 1.13864154151050156e+02,
                             3.77485237685302021e+02, 3.20937758913846947e+03,
                             1.85777706184603153e-01};
constexpr double kErfB[4] = {2.36012909523441209e+01, 2.44024637934444173e+02,
                             1.28261652607737228e+03, 2.84423683343917062e+03};
constexpr double kErfC[9] = {5.64188496988670089e-01, 8.88314979438837594e+00,
                             6.61191906371416295e+01, 2.98635138197400131e+02,
                             8.81952221241769090e+02, 1.71204761263407058e+03,
                             2.05107837782607147e+03, 1.23033935479799725e+03,
                             2.15311535474403846e-08};
constexpr double kErfD[8] = {1.57449261107098347e+01, 1.17693950891312499e+02,
                             5.37181101862009858e+02, 1.62138957456669019e+03,
                             3.29079923573345963e+03, 4.36261909014324716e+03,
                             3.43936767414372164e+03, 1.23033935480374942e+03};
constexpr double kErfP[6] = {3.05326634961232344e-01, 3.60344899949804439e-01,
                             1.25781726111229246e-01, 1.60837851487422766e-02,
                             6.58749161529837803e-04, 1.63153871373020978e-02};
constexpr double kErfQ[5] = {2.56852019228982242e+00, 1.87295284992346047e+00,
                             5.27905102951428412e-01, 6.05183413124413191e-02,
                             2.33520497626869185e-03};
constexpr double kInvSqrtPi = 5.64189583547756287e-01;

// erf on |x| <= 0.46875.
double erf_small(double x) {
  double y = std::fabs(x);
  double z = y * y;
  double num = kErfA[4] * z;
  double den = z;
  for (int i = 0; i < 3; ++i) {
    num = (num + kErfA[i]) * z;
    den = (den + kErfB[i]) * z;
  }
  return x * (num + kErfA[3]) / (den + kErfB[3]);
}

// exp(-x*x) with the split-square trick for accuracy at large x.
double exp_neg_sq(double x) {
  double ysq = std::trunc(x * 16.0) / 16.0;
  double del = (x - ysq) * (x + ysq);
  return exp(-ysq * ysq) * exp(-del);
}

// erfc on 0.46875 < x <= 4.
double erfc_mid(double x) {
  double num = kErfC[8] * x;
  double den = x;
  for (int i = 0; i < 7; ++i) {
    num = (num + kErfC[i]) * x;
    den = (den + kErfD[i]) * x;
  }
  return exp_neg_sq(x) * (num + kErfC[7]) / (den + kErfD[7]);
}

// erfc on x > 4.
double erfc_large(double x) {
  if (x >= 26.6) return 0.0;  // underflows double anyway
  double z = 1.0 / (x * x);
  double num = kErfP[5] * z;
  double den = z;
  for (int i = 0; i < 4; ++i) {
    num = (num + kErfP[i]) * z;
    den = (den + kErfQ[i]) * z;
  }
  double r = z * (num + kErfP[4]) / (den + kErfQ[4]);
  return exp_neg_sq(x) * (kInvSqrtPi - r) / x;
}

}  // namespace

double erfc(double x) {
  double y = std::fabs(x);
  double result;
  if (y <= 0.46875) {
    result = 1.0 - erf_small(x);
    return result;
  } else if (y <= 4.0) {
    result = erfc_mid(y);
  } else {
    result = erfc_large(y);
  }
  return x < 0.0 ? 2.0 - result : result;
}

double erf(double x) {
  if (std::fabs(x) <= 0.46875) return erf_small(x);
  return 1.0 - erfc(x);
}

namespace {
constexpr double kInvSqrt2 = 7.07106781186547461715e-01;
}

double normal_cdf(double x) { return 0.5 * erfc(-x * kInvSqrt2); }

double normal_mass(double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (lo >= 0.0) {
    // both in the right tail: difference of complements avoids cancellation
    return 0.5 * (erfc(lo * kInvSqrt2) - erfc(hi * kInvSqrt2));
  }
  if (hi <= 0.0) {
    return 0.5 * (erfc(-hi * kInvSqrt2) - erfc(-lo * kInvSqrt2));
  }
  // straddling zero: erf of both half-widths, both terms positive
  return 0.5 * (erf(hi * kInvSqrt2) + erf(-lo * kInvSqrt2));
}

}  // namespace quadsim::detmath
