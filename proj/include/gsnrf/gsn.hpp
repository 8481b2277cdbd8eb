#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>

#include "gsnrf/errors.hpp"
#include "gsnrf/numerics/bvn.hpp"
#include "gsnrf/numerics/linalg.hpp"
#include "gsnrf/numerics/normal.hpp"
#include "gsnrf/numerics/quadrature.hpp"
#include "gsnrf/numerics/rng.hpp"
#include "gsnrf/numerics/roots.hpp"

// Generalized skew-normal law GSN_n(mu, Sigma, delta): the distribution of
// mu + diag(delta) V + W with V_i i.i.d. half-normal and W ~ N_n(0, Sigma).
// Its density is
//   2^n phi_n(z; mu, Omega) Phi_n(D Omega^{-1} (z - mu); 0, I - D Omega^{-1} D),
// Omega = Sigma + D^2, D = diag(delta).

namespace gsnrf {

/// Parameters of an n-dimensional GSN law. Sigma is factored on construction.
class GsnParams {
 public:
  GsnParams(Vector mu, Matrix sigma, Vector delta)
      : mu_(std::move(mu)), sigma_(std::move(sigma)), delta_(std::move(delta)) {
    if (mu_.size() != sigma_.dim() || delta_.size() != sigma_.dim()) {
      throw DimensionMismatch("GsnParams: mu has " + std::to_string(mu_.size()) + ", delta has " +
                              std::to_string(delta_.size()) + " entries but Sigma is " +
                              std::to_string(sigma_.dim()) + "-dimensional");
    }
  }

  Eigen::Index dim() const noexcept { return mu_.size(); }
  const Vector& mu() const noexcept { return mu_; }
  const SpdMatrix& sigma() const noexcept { return sigma_; }
  const Vector& delta() const noexcept { return delta_; }

 private:
  Vector mu_;
  SpdMatrix sigma_;
  Vector delta_;
};

/// One-dimensional GSN_1(mu, sigma2, delta).
struct UnivariateGsn {
  double mu = 0.0;
  double sigma2 = 1.0;
  double delta = 0.0;

  double omega() const noexcept { return std::sqrt(sigma2 + delta * delta); }
  double mean() const noexcept { return mu + kHalfNormalMean * delta; }
  double variance() const noexcept { return sigma2 + kHalfNormalVar * delta * delta; }
};

inline double log_pdf(const UnivariateGsn& u, double z) {
  if (!(u.sigma2 > 0.0)) throw DomainError("GSN_1: sigma2 must be positive");
  const double omega = u.omega();
  const double r = z - u.mu;
  return std::numbers::ln2 + log_normal_pdf(r / omega) - std::log(omega) +
         log_normal_cdf(u.delta * r / (omega * std::sqrt(u.sigma2)));
}

inline double pdf(const UnivariateGsn& u, double z) { return std::exp(log_pdf(u, z)); }

/// Log density; exact evaluation is available for n in {1, 2}.
inline double log_pdf(const GsnParams& p, const Vector& z) {
  if (z.size() != p.dim()) throw DimensionMismatch("gsn log_pdf: point has wrong dimension");
  if (p.dim() == 1) {
    return log_pdf(UnivariateGsn{p.mu()(0), p.sigma()(0, 0), p.delta()(0)}, z(0));
  }
  if (p.dim() != 2) {
    throw UnsupportedDimension("gsn log_pdf: exact density needs n <= 2, got n = " +
                               std::to_string(p.dim()));
  }
  const Matrix d2 = p.delta().cwiseProduct(p.delta()).asDiagonal();
  const Matrix omega = p.sigma().matrix() + d2;
  const Vector r = z - p.mu();
  const Eigen::LLT<Matrix> llt(omega);
  const Vector omega_inv_r = llt.solve(r);
  const double log_det = 2.0 * std::log(llt.matrixL()(0, 0) * llt.matrixL()(1, 1));
  const double log_phi2 = -std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * r.dot(omega_inv_r);

  const Vector a = p.delta().cwiseProduct(omega_inv_r);
  const Matrix dmat = p.delta().asDiagonal();
  const Matrix delta_cov = Matrix::Identity(2, 2) - dmat * llt.solve(dmat);
  const double s0 = std::sqrt(delta_cov(0, 0));
  const double s1 = std::sqrt(delta_cov(1, 1));
  const double corr = delta_cov(0, 1) / (s0 * s1);
  return 2.0 * std::numbers::ln2 + log_phi2 + log_bvn_cdf(a(0) / s0, a(1) / s1, corr);
}

inline double pdf(const GsnParams& p, const Vector& z) { return std::exp(log_pdf(p, z)); }

/// Moment generating function 2^n exp(t'mu + t'(Sigma + D^2)t / 2) prod_i Phi(delta_i t_i).
inline double mgf(const GsnParams& p, const Vector& t) {
  if (t.size() != p.dim()) throw DimensionMismatch("gsn mgf: argument has wrong dimension");
  const Vector dt = p.delta().cwiseProduct(t);
  double log_m = t.dot(p.mu()) + 0.5 * (t.dot(p.sigma().matrix() * t) + dt.squaredNorm());
  for (Eigen::Index i = 0; i < t.size(); ++i) log_m += std::numbers::ln2 + log_normal_cdf(dt(i));
  return std::exp(log_m);
}

/// n_draws x n matrix of draws via mu + D V + W. Per draw the stream yields the
/// n normals of W first, then the n half-normals of V.
inline Matrix sample(const GsnParams& p, Eigen::Index n_draws, RngStream& rng) {
  const Eigen::Index n = p.dim();
  const Matrix& l = p.sigma().chol();
  Matrix out(n_draws, n);
  Vector e(n);
  for (Eigen::Index r = 0; r < n_draws; ++r) {
    for (Eigen::Index j = 0; j < n; ++j) e(j) = rng.normal();
    Vector z = p.mu() + l.triangularView<Eigen::Lower>() * e;
    for (Eigen::Index j = 0; j < n; ++j) z(j) += p.delta()(j) * rng.half_normal();
    out.row(r) = z.transpose();
  }
  return out;
}

struct Moments {
  Vector mean;
  Matrix covariance;
};

/// Mean mu + sqrt(2/pi) delta and covariance Sigma + (1 - 2/pi) D^2.
inline Moments closed_moments(const GsnParams& p) {
  Moments m;
  m.mean = p.mu() + kHalfNormalMean * p.delta();
  m.covariance = p.sigma().matrix();
  m.covariance.diagonal() += kHalfNormalVar * p.delta().cwiseProduct(p.delta());
  return m;
}

inline UnivariateGsn marginal(const GsnParams& p, Eigen::Index index) {
  if (index < 0 || index >= p.dim()) {
    throw DomainError("gsn marginal: index " + std::to_string(index) + " out of range [0, " +
                      std::to_string(p.dim()) + ")");
  }
  return {p.mu()(index), p.sigma()(index, index), p.delta()(index)};
}

namespace detail {

inline constexpr double kMarginalRelTol = 1e-12;

// Integrates the density over [x, far-right end] (upper) or [far-left end, x].
inline double marginal_tail_mass(const UnivariateGsn& u, double x, bool upper) {
  const double omega = u.omega();
  auto f = [&](double z) { return pdf(u, z); };
  if (upper) {
    const double hi = std::max(u.mu + kInfinityProxy * omega, x + 3.0 * omega);
    if (x >= hi) return 0.0;
    return integrate_adaptive(f, x, hi, kMarginalRelTol, 1e-300).value;
  }
  const double lo = std::min(u.mu - kInfinityProxy * omega, x - 3.0 * omega);
  if (x <= lo) return 0.0;
  return integrate_adaptive(f, lo, x, kMarginalRelTol, 1e-300).value;
}

}  // namespace detail

/// Marginal cdf by adaptive quadrature of the density. Below the mean the lower
/// tail is integrated directly; above it the cdf is 1 minus the upper tail.
inline double marginal_cdf(const UnivariateGsn& u, double x) {
  if (x <= u.mean()) return detail::marginal_tail_mass(u, x, false);
  return 1.0 - detail::marginal_tail_mass(u, x, true);
}

/// 1 - F(x), relatively accurate in the upper tail.
inline double marginal_sf(const UnivariateGsn& u, double x) {
  if (x > u.mean()) return detail::marginal_tail_mass(u, x, true);
  return 1.0 - detail::marginal_tail_mass(u, x, false);
}

inline constexpr double kDefaultZeta = 1e-9;

/// Inverse of marginal_cdf for p in the window [zeta, 1 - zeta]. The root is
/// found on the log of whichever tail probability is smaller.
inline double marginal_quantile(const UnivariateGsn& u, double p, double zeta = kDefaultZeta) {
  if (!(p >= zeta && p <= 1.0 - zeta)) {
    throw DomainError("marginal_quantile: p = " + std::to_string(p) + " outside [" +
                      std::to_string(zeta) + ", 1 - " + std::to_string(zeta) + "]");
  }
  const double omega = u.omega();
  std::function<double(double)> h;
  if (p <= 0.5) {
    const double target = std::log(p);
    h = [&u, target](double x) {
      const double c = marginal_cdf(u, x);
      return c > 0.0 ? std::log(c) - target : -1e300;
    };
  } else {
    const double target = std::log1p(-p);
    h = [&u, target](double x) {
      const double s = marginal_sf(u, x);
      return s > 0.0 ? target - std::log(s) : 1e300;
    };
  }
  double span = kInfinityProxy;
  for (int attempt = 0; attempt < 4; ++attempt, span *= 2.0) {
    const double lo = u.mu - span * omega;
    const double hi = u.mu + span * omega;
    if (h(lo) <= 0.0 && h(hi) >= 0.0) return brent_root(h, lo, hi, 1e-13 * omega);
  }
  throw NoBracket("marginal_quantile: could not bracket p = " + std::to_string(p));
}

}  // namespace gsnrf
