#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "gsnrf/errors.hpp"
#include "gsnrf/gsn.hpp"
#include "gsnrf/numerics/bvn.hpp"
#include "gsnrf/numerics/linalg.hpp"
#include "gsnrf/numerics/quadrature.hpp"

// Upper-tail dependence of the centred bivariate GSN law
//   GSN_2(-sqrt(2/pi) R delta, Gamma, R delta),  R R = Gamma (or R R^T = Gamma),
// with Gamma the 2x2 correlation matrix with off-diagonal rho.

namespace gsnrf {

/// Which square root of Gamma multiplies the shape vector.
enum class RootKind { Symmetric, Cholesky };

struct TailPairParams {
  double rho = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double zeta = kDefaultZeta;

  void validate() const {
    if (!(std::abs(rho) < 1.0)) {
      throw DomainError("TailPairParams: rho must lie in (-1, 1), got " + std::to_string(rho));
    }
    if (!(zeta > 0.0 && zeta < 0.5)) {
      throw DomainError("TailPairParams: zeta must lie in (0, 1/2), got " + std::to_string(zeta));
    }
    if (!std::isfinite(delta1) || !std::isfinite(delta2)) {
      throw DomainError("TailPairParams: shape parameters must be finite");
    }
  }
};

inline GsnParams build_pair(const TailPairParams& p, RootKind root = RootKind::Symmetric) {
  p.validate();
  const Matrix gamma = correlation_2x2(p.rho);
  const Matrix r = root == RootKind::Symmetric ? sym_sqrt_2x2(gamma) : cholesky(gamma);
  Vector delta(2);
  delta << p.delta1, p.delta2;
  const Vector shape = r * delta;
  return GsnParams(-kHalfNormalMean * shape, gamma, shape);
}

struct OrthantResult {
  double value = 0.0;
  double error = 0.0;  // truncation bound plus a discretization estimate
};

namespace detail {

inline constexpr double kPanelWidth = 0.5;
inline constexpr int kPanels = 17;  // covers the half-normal range [0, 8.5]

struct PanelRules {
  std::array<QuadratureRule, kPanels> fine;
  std::array<QuadratureRule, kPanels> check;
};

inline const PanelRules& panel_rules() {
  static const PanelRules rules = [] {
    PanelRules r;
    for (int p = 0; p < kPanels; ++p) {
      r.fine[p] = gauss_legendre<16>(p * kPanelWidth, (p + 1) * kPanelWidth);
      r.check[p] = gauss_legendre<20>(p * kPanelWidth, (p + 1) * kPanelWidth);
    }
    return r;
  }();
  return rules;
}

// Orthant probability of Z = mu + D V + W, V half-normal, as the half-normal
// mixture E_V[ P(W in orthant | V) ]. `upper` selects {Z > z} versus {Z <= z}.
//
// The (v1, v2) square [0, 8.5]^2 is cut into 0.5 x 0.5 panels. Each panel pair
// is bounded by min(M1(p) N2(q), N1(p) M2(q)), where N is the half-normal mass of
// a panel and M the mass weighted by the univariate conditional probability.
// Panels are integrated (16 x 16 Gauss-Legendre) in order of decreasing bound
// and the sweep stops once the remaining bounds sum below 1e-14 of the total.
inline OrthantResult mixture_orthant(const GsnParams& pair, double z1, double z2, bool upper) {
  if (pair.dim() != 2) throw DimensionMismatch("joint orthant: need a bivariate GSN");
  const double sd1 = std::sqrt(pair.sigma()(0, 0));
  const double sd2 = std::sqrt(pair.sigma()(1, 1));
  const double r = pair.sigma()(0, 1) / (sd1 * sd2);
  const double a1 = (z1 - pair.mu()(0)) / sd1;
  const double a2 = (z2 - pair.mu()(1)) / sd2;
  const double s1 = pair.delta()(0) / sd1;
  const double s2 = pair.delta()(1) / sd2;
  const double sign = upper ? 1.0 : -1.0;

  // Conditional probability of the orthant given (v1, v2).
  auto cond = [&](double v1, double v2) {
    return bvnu(sign * (a1 - s1 * v1), sign * (a2 - s2 * v2), r);
  };
  auto cond1 = [upper](double x) { return upper ? normal_sf(x) : normal_cdf(x); };

  if (s1 == 0.0 && s2 == 0.0) return {cond(0.0, 0.0), 1e-15};

  const auto& rules = panel_rules();
  const double hn = 2.0 * 0.39894228040143267794;  // half-normal density at 0 is 2 phi(0)
  auto hn_pdf = [hn](double v) { return hn * std::exp(-0.5 * v * v); };

  // One-dimensional mixture when only one coordinate is skewed.
  if (s1 == 0.0 || s2 == 0.0) {
    const bool first = s1 != 0.0;
    double total = 0.0;
    double check_total = 0.0;
    for (int p = 0; p < kPanels; ++p) {
      total += rules.fine[p].apply([&](double v) {
        return hn_pdf(v) * (first ? cond(v, 0.0) : cond(0.0, v));
      });
    }
    for (int p = 0; p < kPanels; ++p) {
      check_total += rules.check[p].apply([&](double v) {
        return hn_pdf(v) * (first ? cond(v, 0.0) : cond(0.0, v));
      });
    }
    return {total, std::abs(total - check_total) + 2e-17};
  }

  std::array<double, kPanels> n_mass{}, m1{}, m2{};
  for (int p = 0; p < kPanels; ++p) {
    n_mass[p] = rules.fine[p].apply(hn_pdf);
    m1[p] = rules.fine[p].apply([&](double v) { return hn_pdf(v) * cond1(a1 - s1 * v); });
    m2[p] = rules.fine[p].apply([&](double v) { return hn_pdf(v) * cond1(a2 - s2 * v); });
  }

  struct Cell {
    int p, q;
    double bound;
  };
  std::vector<Cell> cells;
  cells.reserve(kPanels * kPanels);
  double remaining = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    for (int q = 0; q < kPanels; ++q) {
      const double b = std::min(m1[p] * n_mass[q], n_mass[p] * m2[q]);
      cells.push_back({p, q, b});
      remaining += b;
    }
  }
  std::stable_sort(cells.begin(), cells.end(),
                   [](const Cell& x, const Cell& y) { return x.bound > y.bound; });

  // Per-panel node data: argument h, Phi(-h) and the weighted half-normal density.
  const FixedCorrBvnu kernel(r);
  struct NodeData {
    std::vector<double> h, phi_mh, w;
  };
  auto tabulate = [&](const QuadratureRule& rule, double a, double s) {
    NodeData d;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double h = sign * (a - s * rule.nodes[i]);
      d.h.push_back(h);
      d.phi_mh.push_back(normal_cdf(-h));
      d.w.push_back(rule.weights[i] * hn_pdf(rule.nodes[i]));
    }
    return d;
  };
  std::array<NodeData, kPanels> fine1, fine2;
  for (int p = 0; p < kPanels; ++p) {
    fine1[p] = tabulate(rules.fine[p], a1, s1);
    fine2[p] = tabulate(rules.fine[p], a2, s2);
  }
  auto cell_integral = [&](const NodeData& d1, const NodeData& d2) {
    double sum = 0.0;
    for (std::size_t i = 0; i < d1.h.size(); ++i) {
      double inner = 0.0;
      for (std::size_t j = 0; j < d2.h.size(); ++j) {
        inner += d2.w[j] * kernel(d1.h[i], d2.h[j], d1.phi_mh[i], d2.phi_mh[j]);
      }
      sum += d1.w[i] * inner;
    }
    return sum;
  };

  double total = 0.0;
  double discretization = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (remaining <= 1e-14 * total || remaining < 1e-300) break;
    const Cell& cell = cells[c];
    const double v = cell_integral(fine1[cell.p], fine2[cell.q]);
    if (c == 0) {
      discretization = std::abs(v - cell_integral(tabulate(rules.check[cell.p], a1, s1),
                                                  tabulate(rules.check[cell.q], a2, s2)));
    }
    total += v;
    remaining -= cell.bound;
  }
  remaining = std::max(remaining, 0.0);
  // The panels stop at v = 8.5, where the half-normal tail mass is about 2e-17.
  return {total, remaining + discretization + 2e-17};
}

inline void check_orthant(const OrthantResult& r, const char* who) {
  if (r.error > 1e-10 + 1e-6 * r.value) throw QuadratureError(who, r.error);
}

}  // namespace detail

/// P(Z1 > z1, Z2 > z2) for a bivariate GSN, by half-normal mixture quadrature.
inline OrthantResult joint_survival(const GsnParams& pair, double z1, double z2) {
  auto r = detail::mixture_orthant(pair, z1, z2, true);
  detail::check_orthant(r, "joint_survival: quadrature did not converge");
  return r;
}

/// P(Z1 <= z1, Z2 <= z2), same construction.
inline OrthantResult joint_cdf(const GsnParams& pair, double z1, double z2) {
  auto r = detail::mixture_orthant(pair, z1, z2, false);
  detail::check_orthant(r, "joint_cdf: quadrature did not converge");
  return r;
}

enum class TailFlag { Ok, Boundary, OutOfRange };

inline const char* to_string(TailFlag f) noexcept {
  switch (f) {
    case TailFlag::Ok: return "ok";
    case TailFlag::Boundary: return "clipped";
    case TailFlag::OutOfRange: return "out_of_range";
  }
  return "ok";
}

struct TailMeasures {
  double u = 0.0;
  double chi = 0.0;     // P[F2(Z2) > u | F1(Z1) > u]
  double chibar = 0.0;  // 2 ln(1 - u) / ln P[F1 > u, F2 > u] - 1
  TailFlag flag = TailFlag::Ok;
};

/// chi(u) and chibar(u) for the pair law. P[Fi(Zi) > u] is taken as 1 - u.
/// For u < 1/2 the joint survival is assembled as 1 - 2u + P[both <= quantile]
/// so that its logarithm keeps precision.
inline TailMeasures dependence_measures(const TailPairParams& p, double u,
                                        RootKind root = RootKind::Symmetric) {
  p.validate();
  if (!(u >= p.zeta && u <= 1.0 - p.zeta)) {
    throw DomainError("dependence_measures: u = " + std::to_string(u) + " outside [" +
                      std::to_string(p.zeta) + ", 1 - " + std::to_string(p.zeta) + "]");
  }
  const GsnParams pair = build_pair(p, root);
  const UnivariateGsn m1 = marginal(pair, 0);
  const UnivariateGsn m2 = marginal(pair, 1);
  const double q1 = marginal_quantile(m1, u, p.zeta);
  const double q2 = (m2.mu == m1.mu && m2.delta == m1.delta && m2.sigma2 == m1.sigma2)
                        ? q1
                        : marginal_quantile(m2, u, p.zeta);

  double log_joint;
  double joint;
  if (u < 0.5) {
    const double lower = joint_cdf(pair, q1, q2).value;
    log_joint = std::log1p(lower - 2.0 * u);
    joint = std::exp(log_joint);
  } else {
    joint = joint_survival(pair, q1, q2).value;
    log_joint = std::log(joint);
  }

  TailMeasures out;
  out.u = u;
  out.chi = joint / (1.0 - u);
  out.chibar = 2.0 * std::log1p(-u) / log_joint - 1.0;
  if (u == p.zeta || u == 1.0 - p.zeta) out.flag = TailFlag::Boundary;
  if (out.chibar > 1.0 + 1e-6 || out.chibar < -1.0 - 1e-6 || !std::isfinite(out.chibar)) {
    out.flag = TailFlag::OutOfRange;
  }
  out.chibar = std::clamp(out.chibar, -1.0, 1.0);
  return out;
}

struct CurveSeries {
  TailPairParams params;
  std::vector<TailMeasures> rows;
};

/// n points spaced uniformly in logit(u) between zeta and 1 - zeta, endpoints
/// included, so the spacing is logarithmic toward both ends.
inline std::vector<double> default_u_grid(double zeta = kDefaultZeta, int n = 200) {
  if (n < 2) throw DomainError("default_u_grid: need at least two points");
  const double lo = std::log(zeta / (1.0 - zeta));
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    const double t = lo + (-2.0 * lo) * i / (n - 1);
    grid[i] = 1.0 / (1.0 + std::exp(-t));
  }
  grid.front() = zeta;
  grid.back() = 1.0 - zeta;
  return grid;
}

inline CurveSeries chibar_curve(const TailPairParams& p, const std::vector<double>& u_grid,
                                RootKind root = RootKind::Symmetric) {
  p.validate();
  CurveSeries series{p, {}};
  series.rows.reserve(u_grid.size());
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    if (i > 0 && !(u_grid[i] > u_grid[i - 1])) {
      throw DomainError("chibar_curve: u grid must be strictly increasing");
    }
    try {
      series.rows.push_back(dependence_measures(p, u_grid[i], root));
    } catch (const Error& e) {
      throw DomainError("chibar_curve: failed at u = " + std::to_string(u_grid[i]) + ": " +
                        e.what());
    }
  }
  return series;
}

/// The same curve for delta = 0, i.e. the bivariate normal with correlation rho.
inline CurveSeries normal_reference_curve(double rho, const std::vector<double>& u_grid,
                                          double zeta = kDefaultZeta) {
  return chibar_curve(TailPairParams{rho, 0.0, 0.0, zeta}, u_grid);
}

struct Prop1Threshold {
  double value = 0.0;  // +inf when rho <= 0
  bool radicand_negative = false;
};

/// Bound sqrt((1 + delta2^2)(1 + rho) / (2 rho) - 1) on delta1 for case (b).
inline Prop1Threshold prop1_threshold(double rho, double delta2) {
  if (!(std::abs(rho) < 1.0)) {
    throw DomainError("prop1_threshold: rho must lie in (-1, 1), got " + std::to_string(rho));
  }
  if (rho <= 0.0) return {std::numeric_limits<double>::infinity(), false};
  const double radicand = (1.0 + delta2 * delta2) * (1.0 + rho) / (2.0 * rho) - 1.0;
  if (radicand < 0.0) return {0.0, true};
  return {std::sqrt(radicand), false};
}

enum class TailClass { AsymptoticallyIndependentA, AsymptoticallyIndependentB, Indeterminate };

inline const char* to_string(TailClass c) noexcept {
  switch (c) {
    case TailClass::AsymptoticallyIndependentA: return "asymptotically-independent(a)";
    case TailClass::AsymptoticallyIndependentB: return "asymptotically-independent(b)";
    case TailClass::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

/// Case table for the vanishing upper tail dependence coefficient of the pair law.
///   (a): 0 <= d1 <= d2, or d1, d2 < 0, or d1 < 0 <= d2
///   (b): 0 <= d2 < d1 < threshold(rho, d2)
///   otherwise (d1 at or above the threshold, or d2 < 0 <= d1): indeterminate
inline TailClass classify_prop1(double rho, double delta1, double delta2) {
  if (!(std::abs(rho) < 1.0)) {
    throw DomainError("classify_prop1: rho must lie in (-1, 1), got " + std::to_string(rho));
  }
  if (delta1 < 0.0) return TailClass::AsymptoticallyIndependentA;
  if (delta1 <= delta2) return TailClass::AsymptoticallyIndependentA;
  if (delta2 < 0.0) return TailClass::Indeterminate;
  return delta1 < prop1_threshold(rho, delta2).value ? TailClass::AsymptoticallyIndependentB
                                                      : TailClass::Indeterminate;
}

}  // namespace gsnrf
