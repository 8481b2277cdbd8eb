#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gsnrf/errors.hpp"

namespace gsnrf {

/// Truncation point, in standard deviations, used wherever a normal tail is cut off.
inline constexpr double kInfinityProxy = 8.5;

/// sqrt(2/pi): mean of the half-normal law.
inline constexpr double kHalfNormalMean = 0.79788456080286535588;
/// 1 - 2/pi: variance of the half-normal law.
inline constexpr double kHalfNormalVar = 1.0 - 2.0 / std::numbers::pi;

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

inline double log_normal_pdf(double x) noexcept { return -0.5 * x * x - kLogSqrt2Pi; }

inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

/// Upper tail 1 - Phi(x), accurate in relative terms for large x.
inline double normal_sf(double x) noexcept { return normal_cdf(-x); }

/// log Phi(x), finite for every finite x.
inline double log_normal_cdf(double x) noexcept {
  if (x > -30.0) {
    if (x > 5.0) return std::log1p(-normal_sf(x));
    return std::log(normal_cdf(x));
  }
  // Mills-ratio expansion; at x <= -30 the truncation error is below 1e-16 relative.
  const double inv2 = 1.0 / (x * x);
  double series = 1.0;
  double term = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -(2.0 * k - 1.0) * inv2;
    series += term;
  }
  return log_normal_pdf(x) - std::log(-x) + std::log(series);
}

inline double log_normal_sf(double x) noexcept { return log_normal_cdf(-x); }

namespace detail {

// Acklam's rational approximation for the lower half, p <= 0.5.
inline double normal_quantile_lower(double p) noexcept {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // One Halley step on Phi(x) - p brings the 1e-9 approximation to full precision.
  const double dens = normal_pdf(x);
  if (dens > 1e-300) {
    const double u = (normal_cdf(x) - p) / dens;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace detail

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  if (p <= 0.5) return detail::normal_quantile_lower(p);
  return -detail::normal_quantile_lower(1.0 - p);
}

/// Inverse of normal_sf; keeps full precision for tiny upper-tail probabilities.
inline double normal_isf(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("normal_isf: q must lie in (0, 1), got " + std::to_string(q));
  }
  if (q <= 0.5) return -detail::normal_quantile_lower(q);
  return detail::normal_quantile_lower(1.0 - q);
}

}  // namespace gsnrf
