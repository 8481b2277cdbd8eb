#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gsnrf/errors.hpp"
#include "gsnrf/numerics/normal.hpp"

// Marginal skewness and kurtosis of the scale-shape mixture
//   Y = x'beta + sigma lambda^{-1/2} W + gamma lambda^{-1/2} delta T + eps
// at a single site, with W ~ N(0,1), delta ~ N(1,1), T a centred half-normal,
// ln lambda ~ N(-nu/2, nu), eps ~ N(0, tau^2), all independent.

namespace gsnrf {

struct MomentParams {
  double gamma = 0.0;
  double nu = 0.0;  // nu = 0 is the Gaussian-scale limit
  double tau = 1.0;
  double sigma = 1.0;

  void validate() const {
    if (!(sigma > 0.0)) throw DomainError("MomentParams: sigma must be positive");
    if (!(nu >= 0.0)) throw DomainError("MomentParams: nu must be non-negative");
    if (!(tau >= 0.0)) throw DomainError("MomentParams: tau must be non-negative");
    if (!std::isfinite(gamma) || !std::isfinite(nu) || !std::isfinite(tau) ||
        !std::isfinite(sigma)) {
      throw DomainError("MomentParams: parameters must be finite");
    }
  }
};

struct SkewKurt {
  double skewness = 0.0;
  double kurtosis = 3.0;  // raw standardized fourth moment
};

namespace detail {

inline constexpr double kTwoOverPi = 2.0 / std::numbers::pi;
// Third and fourth central moments of the half-normal.
inline constexpr double kHalfNormalMu3 = kHalfNormalMean * (4.0 / std::numbers::pi - 1.0);
inline constexpr double kHalfNormalMu4 =
    3.0 - 4.0 / std::numbers::pi - 12.0 / (std::numbers::pi * std::numbers::pi);

}  // namespace detail

/// Closed-form (S, K). Uses E[lambda^{-k/2}] = exp(k nu / 4 + k^2 nu / 8),
/// E[delta^3] = 4 and E[delta^4] = 10.
inline SkewKurt skew_kurt(const MomentParams& p) {
  p.validate();
  const double a = 1.0 - detail::kTwoOverPi;
  const double g2 = p.gamma * p.gamma;
  const double s2 = p.sigma * p.sigma;
  const double t2 = p.tau * p.tau;
  const double e1 = std::exp(p.nu);
  const double e15 = std::exp(15.0 * p.nu / 8.0);
  const double e3 = std::exp(3.0 * p.nu);
  const double a1 = e3 * a;
  const double a2 = e1 * a;
  const double a3 = e3 * detail::kHalfNormalMu4;

  const double var = t2 + s2 * e1 + 2.0 * g2 * a2;
  const double third = 4.0 * g2 * p.gamma * e15 * detail::kHalfNormalMu3;
  const double fourth = 3.0 * t2 * t2 + 6.0 * t2 * (s2 * e1 + 2.0 * g2 * a2) +
                        3.0 * s2 * s2 * e3 + 12.0 * s2 * g2 * a1 + 10.0 * g2 * g2 * a3;
  return {third / std::pow(var, 1.5), fourth / (var * var)};
}

struct MomentRow {
  MomentParams params;
  SkewKurt value;
};

/// One row per (gamma, nu), gamma varying slowest.
inline std::vector<MomentRow> moment_surface(const std::vector<double>& gamma_grid,
                                             const std::vector<double>& nu_grid, double tau = 1.0,
                                             double sigma = 1.0) {
  if (gamma_grid.empty() || nu_grid.empty()) {
    throw DomainError("moment_surface: gamma and nu grids must be non-empty");
  }
  std::vector<MomentRow> rows;
  rows.reserve(gamma_grid.size() * nu_grid.size());
  for (double g : gamma_grid) {
    for (double nu : nu_grid) {
      const MomentParams p{g, nu, tau, sigma};
      rows.push_back({p, skew_kurt(p)});
    }
  }
  return rows;
}

/// gamma in [-5, 5] in steps of 0.1, built from integers so 0 is exact.
inline std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int i = -50; i <= 50; ++i) g.push_back(i / 10.0);
  return g;
}

inline std::vector<double> default_nu_grid() { return {0.0, 0.25, 0.5, 1.0, 2.0}; }

}  // namespace gsnrf
