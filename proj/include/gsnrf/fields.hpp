#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gsnrf/covariance.hpp"
#include "gsnrf/errors.hpp"
#include "gsnrf/numerics/linalg.hpp"
#include "gsnrf/numerics/normal.hpp"
#include "gsnrf/numerics/rng.hpp"

namespace gsnrf {

/// Skew-Gaussian field Y(s) = mu + W(s) + delta(s) T(s) + eps(s), where
/// W ~ GRF(0, sigma2 rho_w), delta ~ GRF(gamma, gamma^2 rho_delta),
/// T = V - sqrt(2/pi) with V i.i.d. half-normal, eps i.i.d. N(0, tau2).
struct SgrfModel {
  double mu = 0.0;
  double sigma2 = 1.0;
  double gamma = 0.0;
  double tau2 = 0.0;
  MaternParams rho_w{};
  MaternParams rho_delta{};

  void validate() const {
    if (!(sigma2 > 0.0)) throw DomainError("SgrfModel: sigma2 must be positive");
    if (!(tau2 >= 0.0)) throw DomainError("SgrfModel: tau2 must be non-negative");
    if (!std::isfinite(mu) || !std::isfinite(gamma)) {
      throw DomainError("SgrfModel: mu and gamma must be finite");
    }
    rho_w.validate();
    rho_delta.validate();
  }
};

/// Scale-shape mixture field
///   Y_i = x_i' beta + sigma lambda_i^{-1/2} W_i + gamma lambda_i^{-1/2} delta_i T_i + eps_i
/// with W ~ N(0, H), delta ~ N(1, H), ln lambda ~ N(-nu/2 1, nu H) sharing one
/// Matérn correlation matrix H.
struct MixtureModel {
  Vector beta = Vector::Constant(1, 0.0);
  Matrix design;  // n_sites x p; empty means a single intercept column
  double sigma = 1.0;
  double gamma = 0.0;
  double tau2 = 0.0;
  double nu = 1.0;
  MaternParams matern{};

  void validate(std::size_t n_sites) const {
    if (!(sigma > 0.0)) throw DomainError("MixtureModel: sigma must be positive");
    if (!(nu > 0.0)) throw DomainError("MixtureModel: nu must be positive");
    if (!(tau2 >= 0.0)) throw DomainError("MixtureModel: tau2 must be non-negative");
    if (!std::isfinite(gamma)) throw DomainError("MixtureModel: gamma must be finite");
    matern.validate();
    if (design.size() == 0) {
      if (beta.size() != 1) {
        throw DimensionMismatch("MixtureModel: without a design matrix beta must have one entry");
      }
    } else {
      if (design.rows() != static_cast<Eigen::Index>(n_sites)) {
        throw DimensionMismatch("MixtureModel: design has " + std::to_string(design.rows()) +
                                " rows for " + std::to_string(n_sites) + " sites");
      }
      if (design.cols() != beta.size()) {
        throw DimensionMismatch("MixtureModel: design has " + std::to_string(design.cols()) +
                                " columns but beta has " + std::to_string(beta.size()));
      }
    }
  }

  Vector mean_surface(std::size_t n_sites) const {
    if (design.size() == 0) return Vector::Constant(static_cast<Eigen::Index>(n_sites), beta(0));
    return design * beta;
  }
};

/// Latent panels, each n_reps x n_sites. For the plain field lambda is 1.
struct LatentPanels {
  Matrix w, delta, lambda, t, epsilon;
};

struct SimGrid {
  SiteSet sites;
  Matrix reps;  // n_reps x n_sites
  std::optional<LatentPanels> latents;
  double jitter = 0.0;  // largest diagonal jitter applied to any correlation matrix
};

/// Sub-stream index of each latent panel within a replicate's stream. Panels
/// are drawn in this order; replicate r uses rng.split(r).split(panel).
enum class LatentStream : std::uint64_t { W = 0, Delta = 1, Lambda = 2, V = 3, Epsilon = 4 };

namespace detail {

inline RngStream panel_stream(const RngStream& root, Eigen::Index rep, LatentStream which) {
  return root.split(static_cast<std::uint64_t>(rep)).split(static_cast<std::uint64_t>(which));
}

inline Vector correlated_normals(const Matrix& chol, RngStream& rng) {
  Vector e(chol.rows());
  for (Eigen::Index j = 0; j < e.size(); ++j) e(j) = rng.normal();
  return chol.triangularView<Eigen::Lower>() * e;
}

inline void check_reps(Eigen::Index n_reps, const SiteSet& sites) {
  if (n_reps < 1) throw DomainError("simulation needs at least one replicate");
  if (sites.empty()) throw DomainError("simulation needs at least one site");
}

}  // namespace detail

inline SimGrid simulate_sgrf(const SgrfModel& model, const SiteSet& sites, Eigen::Index n_reps,
                             const RngStream& rng, bool emit_latents = false) {
  model.validate();
  detail::check_reps(n_reps, sites);
  const auto n = static_cast<Eigen::Index>(sites.size());
  const CorrelationMatrix hw = corr_matrix(sites, model.rho_w);
  const bool shared = model.rho_w.psi == model.rho_delta.psi && model.rho_w.xi == model.rho_delta.xi;
  const CorrelationMatrix hd = shared ? hw : corr_matrix(sites, model.rho_delta);
  const double sd_w = std::sqrt(model.sigma2);
  const double tau = std::sqrt(model.tau2);

  SimGrid grid{sites, Matrix(n_reps, n), std::nullopt, std::max(hw.jitter, hd.jitter)};
  if (emit_latents) {
    grid.latents = LatentPanels{Matrix(n_reps, n), Matrix(n_reps, n), Matrix::Ones(n_reps, n),
                                Matrix(n_reps, n), Matrix(n_reps, n)};
  }
  for (Eigen::Index r = 0; r < n_reps; ++r) {
    RngStream sw = detail::panel_stream(rng, r, LatentStream::W);
    RngStream sd = detail::panel_stream(rng, r, LatentStream::Delta);
    RngStream sv = detail::panel_stream(rng, r, LatentStream::V);
    RngStream se = detail::panel_stream(rng, r, LatentStream::Epsilon);
    const Vector w = sd_w * detail::correlated_normals(hw.h.chol(), sw);
    // delta(s) = gamma (1 + unit-variance field): mean gamma, covariance gamma^2 rho_delta.
    const Vector delta =
        model.gamma * (Vector::Ones(n) + detail::correlated_normals(hd.h.chol(), sd));
    for (Eigen::Index j = 0; j < n; ++j) {
      const double t = sv.half_normal() - kHalfNormalMean;
      const double eps = tau * se.normal();
      grid.reps(r, j) = model.mu + w(j) + delta(j) * t + eps;
      if (grid.latents) {
        grid.latents->w(r, j) = w(j);
        grid.latents->delta(r, j) = delta(j);
        grid.latents->t(r, j) = t;
        grid.latents->epsilon(r, j) = eps;
      }
    }
  }
  return grid;
}

inline SimGrid simulate_mixture(const MixtureModel& model, const SiteSet& sites,
                                Eigen::Index n_reps, const RngStream& rng,
                                bool emit_latents = false) {
  detail::check_reps(n_reps, sites);
  model.validate(sites.size());
  const auto n = static_cast<Eigen::Index>(sites.size());
  const CorrelationMatrix h = corr_matrix(sites, model.matern);
  const Matrix& l = h.h.chol();
  const Vector mean = model.mean_surface(sites.size());
  const double sd_log_lambda = std::sqrt(model.nu);
  const double tau = std::sqrt(model.tau2);

  SimGrid grid{sites, Matrix(n_reps, n), std::nullopt, h.jitter};
  if (emit_latents) {
    grid.latents = LatentPanels{Matrix(n_reps, n), Matrix(n_reps, n), Matrix(n_reps, n),
                                Matrix(n_reps, n), Matrix(n_reps, n)};
  }
  for (Eigen::Index r = 0; r < n_reps; ++r) {
    RngStream sw = detail::panel_stream(rng, r, LatentStream::W);
    RngStream sd = detail::panel_stream(rng, r, LatentStream::Delta);
    RngStream sl = detail::panel_stream(rng, r, LatentStream::Lambda);
    RngStream sv = detail::panel_stream(rng, r, LatentStream::V);
    RngStream se = detail::panel_stream(rng, r, LatentStream::Epsilon);
    const Vector w = detail::correlated_normals(l, sw);
    const Vector delta = Vector::Ones(n) + detail::correlated_normals(l, sd);
    const Vector log_lambda =
        Vector::Constant(n, -0.5 * model.nu) + sd_log_lambda * detail::correlated_normals(l, sl);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lambda = std::exp(log_lambda(j));
      const double scale = std::exp(-0.5 * log_lambda(j));
      const double t = sv.half_normal() - kHalfNormalMean;
      const double eps = tau * se.normal();
      grid.reps(r, j) =
          mean(j) + model.sigma * scale * w(j) + model.gamma * scale * delta(j) * t + eps;
      if (grid.latents) {
        grid.latents->w(r, j) = w(j);
        grid.latents->delta(r, j) = delta(j);
        grid.latents->lambda(r, j) = lambda;
        grid.latents->t(r, j) = t;
        grid.latents->epsilon(r, j) = eps;
      }
    }
  }
  return grid;
}

struct StationaryMoments {
  double mean = 0.0;
  double variance = 0.0;
  double sigma2 = 0.0;
  MaternParams rho_w{};

  /// Cov[Y(s), Y(s')] at ||s - s'|| = d; excludes the nugget and the skew term.
  double covariance(double d) const { return sigma2 * matern_rho(d, rho_w); }
};

/// mean mu, variance tau2 + sigma2 + 2 gamma^2 (1 - 2/pi), covariance sigma2 rho_w(d).
inline StationaryMoments stationary_moments(const SgrfModel& model) {
  model.validate();
  return {model.mu,
          model.tau2 + model.sigma2 + 2.0 * model.gamma * model.gamma * kHalfNormalVar,
          model.sigma2, model.rho_w};
}

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;  // m3 / m2^1.5
  double kurtosis = 0.0;  // m4 / m2^2, Gaussian baseline 3
  std::size_t count = 0;
  bool degenerate = false;  // zero spread; skewness and kurtosis are NaN
};

/// Two-pass moment estimates of a sample.
template <class Range>
SampleStats sample_stats(const Range& values) {
  SampleStats s;
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    ++s.count;
  }
  if (s.count < 2) throw DomainError("sample_stats: need at least two values");
  s.mean = sum / static_cast<double>(s.count);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double c = v - s.mean;
    const double c2 = c * c;
    m2 += c2;
    m3 += c2 * c;
    m4 += c2 * c2;
  }
  const double n = static_cast<double>(s.count);
  s.variance = m2 / (n - 1.0);
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 <= 0.0) {
    s.degenerate = true;
    s.variance = 0.0;
    s.skewness = std::numeric_limits<double>::quiet_NaN();
    s.kurtosis = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.skewness = m3 / std::pow(m2, 1.5);
  s.kurtosis = m4 / (m2 * m2);
  return s;
}

struct EmpiricalMoments {
  std::vector<SampleStats> per_site;
  SampleStats pooled;
  Matrix covariance;  // unbiased site-by-site covariance across replicates
  bool any_degenerate = false;
};

inline EmpiricalMoments empirical_moments(const SimGrid& grid) {
  const Matrix& y = grid.reps;
  if (y.rows() < 2) throw DomainError("empirical_moments: need at least two replicates");
  EmpiricalMoments out;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const Vector col = y.col(j);
    out.per_site.push_back(sample_stats(std::vector<double>(col.data(), col.data() + col.size())));
    out.any_degenerate = out.any_degenerate || out.per_site.back().degenerate;
  }
  out.pooled = sample_stats(std::vector<double>(y.data(), y.data() + y.size()));
  out.any_degenerate = out.any_degenerate || out.pooled.degenerate;
  const Matrix centred = y.rowwise() - y.colwise().mean();
  out.covariance = centred.transpose() * centred / static_cast<double>(y.rows() - 1);
  return out;
}

}  // namespace gsnrf
