#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gsnrf/errors.hpp"
#include "gsnrf/numerics/normal.hpp"
#include "gsnrf/numerics/quadrature.hpp"

// Standard bivariate normal orthant probabilities after Genz (2004): Gauss-Legendre
// integration over the arcsine of the correlation for |r| < 0.925 and an
// asymptotic-corrected integral near |r| = 1. Absolute error is about 1e-15.

namespace gsnrf {

namespace detail {

struct GenzRule {
  const double* x;
  const double* w;
  int n;
};

inline GenzRule genz_rule(double abs_r) noexcept {
  static constexpr double w6[] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
  static constexpr double x6[] = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
  static constexpr double w12[] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                                   0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
  static constexpr double x12[] = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                                   0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
  static constexpr double w20[] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                                   0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                                   0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                                   0.1527533871307259};
  static constexpr double x20[] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                                   0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                                   0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                                   0.07652652113349733};
  if (abs_r < 0.3) return {x6, w6, 3};
  if (abs_r < 0.75) return {x12, w12, 6};
  return {x20, w20, 10};
}

// Upper orthant P(X > dh, Y > dk) for standard bivariate normal with correlation r.
inline double bvnu(double dh, double dk, double r) noexcept {
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double tp = 2.0 * std::numbers::pi;
  if (dh == inf || dk == inf) return 0.0;
  if (dh == -inf) return dk == -inf ? 1.0 : normal_cdf(-dk);
  if (dk == -inf) return normal_cdf(-dh);
  if (r == 0.0) return normal_cdf(-dh) * normal_cdf(-dk);

  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;
  const GenzRule rule = genz_rule(std::abs(r));

  if (std::abs(r) < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = 0.5 * std::asin(r);
    for (int i = 0; i < rule.n; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double sn = std::sin(asr * (1.0 + sgn * rule.x[i]));
        bvn += rule.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    return std::clamp(bvn * asr / tp + normal_cdf(-h) * normal_cdf(-k), 0.0, 1.0);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = 1.0 - r * r;
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    double asr = -0.5 * (bs / as + hk);
    if (asr > -100.0) {
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    }
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      const double sp = std::sqrt(tp) * normal_cdf(-b / a);
      bvn -= std::exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a *= 0.5;
    for (int i = 0; i < rule.n; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double xs = std::pow(a * (1.0 + sgn * rule.x[i]), 2);
        const double rs = std::sqrt(1.0 - xs);
        asr = -0.5 * (bs / xs + hk);
        if (asr > -100.0) {
          const double sp = 1.0 + c * xs * (1.0 + d * xs);
          const double ep = std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
          bvn += a * rule.w[i] * std::exp(asr) * (ep - sp);
        }
      }
    }
    bvn = -bvn / tp;
  }
  if (r > 0.0) {
    bvn += normal_cdf(-std::max(h, k));
  } else if (h >= k) {
    bvn = -bvn;
  } else {
    const double l = h < 0.0 ? normal_cdf(k) - normal_cdf(h) : normal_cdf(-h) - normal_cdf(-k);
    bvn = l - bvn;
  }
  return std::clamp(bvn, 0.0, 1.0);
}

// bvnu with the correlation fixed, for evaluating many (h, k) pairs. The
// correlation-only factors of each node are precomputed; callers may pass
// Phi(-h) and Phi(-k) when they already hold them. Agrees with bvnu bit for bit
// in the |r| < 0.925 branch and to rounding elsewhere.
class FixedCorrBvnu {
 public:
  explicit FixedCorrBvnu(double r) : r_(r), rule_(genz_rule(std::abs(r))) {
    const int m = 2 * rule_.n;
    if (r == 0.0) return;
    if (std::abs(r) < 0.925) {
      const double asr = 0.5 * std::asin(r);
      for (int i = 0; i < rule_.n; ++i) {
        for (int j = 0; j < 2; ++j) {
          const double sn = std::sin(asr * (1.0 + (j == 0 ? -1.0 : 1.0) * rule_.x[i]));
          sn_[2 * i + j] = sn;
          inv_[2 * i + j] = 1.0 / (1.0 - sn * sn);
          w_[2 * i + j] = rule_.w[i] * asr / (2.0 * std::numbers::pi);
        }
      }
      nodes_ = m;
    }
  }

  double operator()(double h, double k) const noexcept {
    return (*this)(h, k, normal_cdf(-h), normal_cdf(-k));
  }

  double operator()(double h, double k, double phi_mh, double phi_mk) const noexcept {
    if (nodes_ == 0) return r_ == 0.0 ? phi_mh * phi_mk : bvnu(h, k, r_);
    const double hk = h * k;
    const double hs = 0.5 * (h * h + k * k);
    double bvn = 0.0;
    for (int i = 0; i < nodes_; ++i) bvn += w_[i] * std::exp((sn_[i] * hk - hs) * inv_[i]);
    return std::clamp(bvn + phi_mh * phi_mk, 0.0, 1.0);
  }

  double correlation() const noexcept { return r_; }

 private:
  double r_;
  GenzRule rule_;
  int nodes_ = 0;
  std::array<double, 20> sn_{}, inv_{}, w_{};
};

inline void check_correlation(double rho, const char* who) {
  if (!(std::abs(rho) < 1.0)) {
    throw DomainError(std::string(who) + ": correlation must satisfy |rho| < 1, got " +
                      std::to_string(rho));
  }
}

}  // namespace detail

/// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.
inline double bvn_cdf(double x, double y, double rho) {
  detail::check_correlation(rho, "bvn_cdf");
  return detail::bvnu(-x, -y, rho);
}

/// P(X > x, Y > y). Computed directly so small upper-orthant values keep relative accuracy.
inline double bvn_survival(double x, double y, double rho) {
  detail::check_correlation(rho, "bvn_survival");
  return detail::bvnu(x, y, rho);
}

namespace detail {

inline double log_bvn_cdf_by_conditioning(double x, double y, double rho) {
  const double s = std::sqrt(1.0 - rho * rho);
  auto g = [&](double t) { return log_normal_pdf(t) + log_normal_cdf((y - rho * t) / s); };
  // g is concave (sum of concave terms), so a coarse scan locates the mode.
  double t_max = x;
  double g_max = g(x);
  for (double t = x - 0.1; t >= x - 60.0; t -= 0.1) {
    const double gt = g(t);
    if (gt > g_max) {
      g_max = gt;
      t_max = t;
    } else if (gt < g_max - 50.0) {
      break;
    }
  }
  const double lo = t_max - 12.0;
  const double hi = std::min(x, t_max + 12.0);
  const auto r = integrate_adaptive([&](double t) { return std::exp(g(t) - g_max); }, lo, hi, 1e-12);
  return g_max + std::log(r.value);
}

}  // namespace detail

/// log P(X <= x, Y <= y). Falls back to log-space integration of
/// phi(t) Phi((y - rho t) / sqrt(1 - rho^2)) when the probability underflows.
inline double log_bvn_cdf(double x, double y, double rho) {
  const double p = bvn_cdf(x, y, rho);
  if (p > 1e-300) return std::log(p);
  return detail::log_bvn_cdf_by_conditioning(x, y, rho);
}
}  // namespace gsnrf
