#pragma once

#include <cmath>
#include <string>

#include "ssd/error.hpp"

namespace ssd {
namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double ibeta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;

  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double ibeta_regularized(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    fail(ErrorKind::Numeric, "ibeta requires positive shape parameters");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(log_front) * detail::ibeta_continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(log_front) * detail::ibeta_continued_fraction(b, a, 1.0 - x) / b;
}

// Upper tail P[F(df1, df2) > f] of the F distribution.
inline double f_upper_tail(double f, int df1, int df2) {
  if (df1 < 1 || df2 < 1) fail(ErrorKind::Numeric, "F distribution needs df >= 1");
  if (f < 0.0) fail(ErrorKind::Numeric, "F statistic must be nonnegative");
  if (f == 0.0) return 1.0;
  const double x = df2 / (df2 + df1 * f);
  return ibeta_regularized(df2 / 2.0, df1 / 2.0, x);
}

}  // namespace ssd
