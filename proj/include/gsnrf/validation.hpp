#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gsnrf/commands.hpp"
#include "gsnrf/covariance.hpp"
#include "gsnrf/fields.hpp"
#include "gsnrf/gsn.hpp"
#include "gsnrf/moments.hpp"
#include "gsnrf/numerics/ks.hpp"
#include "gsnrf/numerics/quadrature.hpp"
#include "gsnrf/taildep.hpp"

// The acceptance battery shared by `gsnrf validate` and the acceptance test.
// Full mode runs every criterion at its stated size and tolerance. Quick mode
// shrinks Monte Carlo sizes and, where a fixed relative tolerance would then be
// below the sampling noise, widens it to four standard errors.

namespace gsnrf {

struct ValidationOptions {
  bool quick = false;
  std::uint64_t seed = 20240101;
  std::string scratch_dir;  // empty: a directory under the system temp path
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  // Failed only in a part documented as unattainable at the stated sample size.
  bool known_infeasible = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

namespace validation {

struct Outcome {
  bool passed = true;
  bool known_infeasible = false;
  std::ostringstream detail;

  void fail() { passed = false; }
  // Records a comparison; returns its result.
  bool check(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << "FAIL " << what << "; ";
    }
    return ok;
  }
};

inline std::string num(double x, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline GsnParams gsn2(double rho, double d1, double d2, double s1 = 1.0, double s2 = 1.5,
                      double m1 = 0.2, double m2 = -0.1) {
  Matrix sigma(2, 2);
  const double c = rho * std::sqrt(s1 * s2);
  sigma << s1, c, c, s2;
  Vector mu(2), delta(2);
  mu << m1, m2;
  delta << d1, d2;
  return GsnParams(mu, sigma, delta);
}

inline GsnParams gsn3(const Vector& delta) {
  Matrix sigma(3, 3);
  sigma << 1.0, 0.5, -0.3, 0.5, 2.0, 0.4, -0.3, 0.4, 1.5;
  Vector mu(3);
  mu << 0.5, -1.0, 0.0;
  return GsnParams(mu, sigma, delta);
}

// --- 1: density normalization ---------------------------------------------
inline void density_normalization(const ValidationOptions&, Outcome& out) {
  const std::vector<double> deltas1 = {0.0, 1.0, -1.0, 2.0, 0.5, -2.0};
  double worst1 = 0.0;
  for (double d : deltas1) {
    const UnivariateGsn u{0.3, 1.5, d};
    const double w = u.omega();
    const double mass =
        integrate_adaptive([&](double z) { return pdf(u, z); }, u.mu - 12.0 * w, u.mu + 12.0 * w,
                           1e-13)
            .value;
    worst1 = std::max(worst1, std::abs(mass - 1.0));
    out.check(std::abs(mass - 1.0) <= 1e-8, "GSN1 delta=" + num(d) + " mass " + num(mass, 17));
  }
  const std::vector<std::pair<double, double>> deltas2 = {{0, 0}, {1, 1}, {-1, -1},
                                                          {2, 1}, {1, -1}, {0.5, 2}};
  double worst2 = 0.0;
  Vector z(2);
  for (double rho : {0.0, 0.4, 0.8}) {
    for (const auto& [d1, d2] : deltas2) {
      const GsnParams p = gsn2(rho, d1, d2);
      const UnivariateGsn a = marginal(p, 0), b = marginal(p, 1);
      const auto r1 = composite_gauss_legendre<16>(a.mu - 10 * a.omega(), a.mu + 10 * a.omega(), 30);
      const auto r2 = composite_gauss_legendre<16>(b.mu - 10 * b.omega(), b.mu + 10 * b.omega(), 30);
      double mass = 0.0;
      for (std::size_t i = 0; i < r1.size(); ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < r2.size(); ++j) {
          z << r1.nodes[i], r2.nodes[j];
          inner += r2.weights[j] * pdf(p, z);
        }
        mass += r1.weights[i] * inner;
      }
      worst2 = std::max(worst2, std::abs(mass - 1.0));
      out.check(std::abs(mass - 1.0) <= 1e-6,
                "GSN2 rho=" + num(rho) + " delta=(" + num(d1) + "," + num(d2) + ") mass " + num(mass, 17));
    }
  }
  out.detail << "max |mass-1|: GSN1 " << num(worst1, 3) << " (tol 1e-8, 6 sets), GSN2 "
             << num(worst2, 3) << " (tol 1e-6, 18 sets)";
}

// --- 2: sampler fidelity ----------------------------------------------------
inline void sampler_fidelity(const ValidationOptions& o, Outcome& out) {
  const Eigen::Index n_draws = o.quick ? 100000 : 1000000;
  Vector d3(3);
  d3 << -1.5, 0.5, 2.5;
  std::vector<GsnParams> sets = {gsn2(0.4, 1.0, -1.0), gsn2(0.8, 2.0, 0.5, 1.0, 1.0, 1.0, -1.0),
                                 gsn3(d3), GsnParams(Vector::Constant(1, 0.5), Matrix::Constant(1, 1, 2.0),
                                                     Vector::Constant(1, 3.0)),
                                 gsn3(Vector::Zero(3))};
  double worst_z = 0.0;
  const RngStream root(o.seed);
  for (std::size_t s = 0; s < sets.size(); ++s) {
    RngStream rng = root.split(s);
    const Matrix x = sample(sets[s], n_draws, rng);
    const Moments m = closed_moments(sets[s]);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Matrix c = x.rowwise() - mean;
    const double n = static_cast<double>(n_draws);
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      const double se = std::sqrt(c.col(i).squaredNorm() / (n - 1.0) / n);
      const double zs = std::abs(mean(i) - m.mean(i)) / se;
      worst_z = std::max(worst_z, zs);
      out.check(zs <= 4.0, "set " + std::to_string(s) + " mean[" + std::to_string(i) + "] z=" + num(zs));
      for (Eigen::Index j = i; j < x.cols(); ++j) {
        const Vector prod = c.col(i).cwiseProduct(c.col(j));
        const double cov = prod.sum() / (n - 1.0);
        const double se_c = std::sqrt((prod.array() - prod.mean()).square().sum() / (n - 1.0) / n);
        const double zc = std::abs(cov - m.covariance(i, j)) / se_c;
        worst_z = std::max(worst_z, zc);
        out.check(zc <= 4.0, "set " + std::to_string(s) + " cov[" + std::to_string(i) + "," +
                                 std::to_string(j) + "] z=" + num(zc));
      }
    }
  }
  out.detail << sets.size() << " parameter sets, " << n_draws << " draws, max |z| " << num(worst_z, 3)
             << " (limit 4)";
}

// --- 3: marginal KS -----------------------------------------------------------
inline void marginal_ks(const ValidationOptions& o, Outcome& out) {
  const Eigen::Index n_draws = o.quick ? 10000 : 100000;
  Vector delta(3);
  delta << -2.0, 0.5, 3.0;
  const GsnParams p = gsn3(delta);
  RngStream rng = RngStream(o.seed).split(3);
  const Matrix x = sample(p, n_draws, rng);
  out.detail << n_draws << " draws, delta=(-2,0.5,3):";
  for (Eigen::Index i = 0; i < 3; ++i) {
    const UnivariateGsn m = marginal(p, i);
    std::vector<double> col(x.col(i).data(), x.col(i).data() + n_draws);
    const double d = ks_statistic(col, [&](double v) { return marginal_cdf(m, v); });
    const double pv = ks_pvalue(d, col.size());
    out.check(pv > 0.01, "component " + std::to_string(i) + " p=" + num(pv));
    out.detail << " D" << i << "=" << num(d, 4) << " p=" << num(pv, 3);
  }
}

// --- 4: Gaussian tail reduction ------------------------------------------------
inline void gaussian_reduction(const ValidationOptions&, Outcome& out) {
  double worst = 0.0, worst_indep = 0.0;
  for (double rho : {0.4, 0.8}) {
    for (double u : {0.9, 0.99, 0.999}) {
      const TailMeasures m = dependence_measures({rho, 0.0, 0.0}, u);
      const double q = normal_quantile(u);
      const double s = bvn_survival(q, q, rho);
      const double chi = s / (1.0 - u);
      const double chibar = 2.0 * std::log1p(-u) / std::log(s) - 1.0;
      const double err = std::max(std::abs(m.chi - chi), std::abs(m.chibar - chibar));
      worst = std::max(worst, err);
      out.check(err <= 1e-6, "rho=" + num(rho) + " u=" + num(u) + " err " + num(err, 3));
    }
  }
  for (double u : {0.9, 0.99, 0.999}) {
    const double cb = std::abs(dependence_measures({0.0, 0.0, 0.0}, u).chibar);
    worst_indep = std::max(worst_indep, cb);
    out.check(cb <= 1e-10, "independence u=" + num(u) + " chibar " + num(cb, 3));
  }
  out.detail << "max deviation from bivariate normal " << num(worst, 3)
             << " (tol 1e-6); independence |chibar| " << num(worst_indep, 3) << " (tol 1e-10)";
}

// --- 5: Proposition 1 -----------------------------------------------------------
struct Prop1Case {
  double rho, delta1, delta2;
  TailClass expected;
};

/// Hand-derived from the case inequalities. Thresholds used:
/// rho=0.4: 0.8660 (d2=0), 1.0897 (d2=0.5), 1.5811 (d2=1);
/// rho=0.8: 0.3536 (d2=0), 0.6374 (d2=0.5), 1.1180 (d2=1);
/// rho=0.95: 0.1622 (d2=0); rho <= 0: unbounded.
inline const std::vector<Prop1Case>& prop1_truth_table() {
  using T = TailClass;
  constexpr T A = T::AsymptoticallyIndependentA, B = T::AsymptoticallyIndependentB,
              I = T::Indeterminate;
  static const std::vector<Prop1Case> table = {
      {0.4, 1, 2, A},      {0.4, 0, 0, A},      {0.4, 0.5, 0.5, A},  {0.4, -1, -0.5, A},
      {0.4, -0.5, -1, A},  {0.4, -1, 2, A},     {0.4, -0.5, 0, A},   {0.4, 0.5, 0, B},
      {0.4, 0.8, 0, B},    {0.4, 1, 0, I},      {0.4, 1, 0.5, B},    {0.4, 1.5, 1, B},
      {0.4, 2, 1, I},      {0.4, 1, -0.5, I},   {0.4, 0, -1, I},     {0.8, 0.3, 0, B},
      {0.8, 0.4, 0, I},    {0.8, 1, -0.5, I},   {0.8, 0.6, 0.5, B},  {0.8, 0.7, 0.5, I},
      {0.8, 1, 1, A},      {0.8, 2, 1, I},      {0.8, 1.1, 1, B},    {0.8, -1, -1, A},
      {0.95, 0.1, 0, B},   {0.95, 0.2, 0, I},   {0.0, 5, 1, B},      {-0.5, 2, 0, B},
      {-0.5, 0.5, -0.5, I}, {0.0, -2, 1, A}};
  return table;
}

inline void proposition_one(const ValidationOptions&, Outcome& out) {
  const double t = prop1_threshold(0.8, 0.0).value;
  out.check(std::abs(t - 0.3535534) <= 1e-7, "threshold " + num(t, 17));
  int mismatches = 0, decreasing = 0, case_a = 0;
  for (const auto& c : prop1_truth_table()) {
    const TailClass got = classify_prop1(c.rho, c.delta1, c.delta2);
    if (got != c.expected) {
      ++mismatches;
      out.check(false, "classify(" + num(c.rho) + "," + num(c.delta1) + "," + num(c.delta2) +
                           ") = " + to_string(got));
    }
    if (c.expected != TailClass::AsymptoticallyIndependentA) continue;
    ++case_a;
    const TailPairParams p{c.rho, c.delta1, c.delta2};
    const double x1 = dependence_measures(p, 0.99).chi;
    const double x2 = dependence_measures(p, 0.999).chi;
    const double x3 = dependence_measures(p, 0.9999).chi;
    if (out.check(x1 > x2 && x2 > x3, "chi not decreasing at (" + num(c.rho) + "," + num(c.delta1) +
                                          "," + num(c.delta2) + "): " + num(x1) + "," + num(x2) +
                                          "," + num(x3))) {
      ++decreasing;
    }
  }
  out.detail << "threshold " << num(t, 10) << "; truth table " << prop1_truth_table().size() - mismatches
             << "/" << prop1_truth_table().size() << " exact; chi decreasing in " << decreasing << "/"
             << case_a << " case-(a) configurations";
}

// --- 6: chi-bar battery ----------------------------------------------------------
inline void chibar_battery(const ValidationOptions& o, Outcome& out) {
  const std::vector<double> rhos = o.quick ? std::vector<double>{0.4} : rho_battery();
  const std::vector<double> deltas = o.quick ? std::vector<double>{-1.0, 0.0, 1.0} : delta_battery();
  const std::vector<double> grid = default_u_grid(kDefaultZeta, o.quick ? 50 : 200);
  std::size_t curves = 0, points = 0, bad = 0;
  for (double rho : rhos) {
    std::vector<TailPairParams> configs;
    for (double d1 : deltas) {
      for (double d2 : deltas) configs.push_back({rho, d1, d2});
    }
    configs.push_back({rho, 0.0, 0.0});  // normal reference
    for (const auto& p : configs) {
      const CurveSeries s = chibar_curve(p, grid);
      ++curves;
      for (const auto& r : s.rows) {
        ++points;
        if (!std::isfinite(r.chi) || !std::isfinite(r.chibar) || r.chibar < -1.0 || r.chibar > 1.0 ||
            r.flag == TailFlag::OutOfRange) {
          ++bad;
          out.check(false, "rho=" + num(rho) + " delta=(" + num(p.delta1) + "," + num(p.delta2) +
                               ") u=" + num(r.u) + " chibar=" + num(r.chibar));
        }
      }
    }
  }
  // Sign flips (d1, d2) -> (-d1, -d2) within the battery. Pairs with d2 = -d1 are
  // excluded: there the flip is the label exchange, which leaves the curve unchanged.
  std::size_t flips = 0;
  double min_gap = 1.0;
  for (double rho : rhos) {
    for (double d1 : deltas) {
      for (double d2 : deltas) {
        const bool in_battery = std::find(deltas.begin(), deltas.end(), -d1) != deltas.end() &&
                                std::find(deltas.begin(), deltas.end(), -d2) != deltas.end();
        if (!in_battery || d2 == -d1) continue;
        if (d1 < 0.0 || (d1 == 0.0 && d2 < 0.0)) continue;  // count each pair once
        const double a = dependence_measures({rho, d1, d2}, 0.99).chibar;
        const double b = dependence_measures({rho, -d1, -d2}, 0.99).chibar;
        ++flips;
        min_gap = std::min(min_gap, std::abs(a - b));
        out.check(std::abs(a - b) > 1e-3, "flip rho=" + num(rho) + " delta=(" + num(d1) + "," +
                                              num(d2) + ") gap " + num(std::abs(a - b), 3));
      }
    }
  }
  out.detail << curves << " curves x " << grid.size() << " points, " << bad << " invalid of " << points
             << "; " << flips << " sign-flip pairs, min |gap| at u=0.99 " << num(min_gap, 4)
             << " (need > 1e-3)";
}

// --- 7: moment formulas -------------------------------------------------------------
inline void moment_formulas(const ValidationOptions& o, Outcome& out) {
  const SkewKurt g0 = skew_kurt({0.0, 0.0, 1.0, 1.0});
  out.check(g0.skewness == 0.0 && g0.kurtosis == 3.0,
            "(a) S=" + num(g0.skewness, 17) + " K=" + num(g0.kurtosis, 17));
  const SkewKurt big = skew_kurt({100.0, 0.0, 1.0, 1.0});
  out.check(std::abs(big.skewness / 1.4075 - 1.0) <= 0.01, "(b) S=" + num(big.skewness, 8));
  out.check(std::abs(big.kurtosis / 9.672 - 1.0) <= 0.01, "(b) K=" + num(big.kurtosis, 8));
  out.detail << "(a) exact; (b) S=" << num(big.skewness, 6) << " K=" << num(big.kurtosis, 6) << "; (c)";

  const bool exact_parts_ok = out.passed;
  const Eigen::Index reps = o.quick ? 100000 : 1000000;
  const Eigen::Index batches = 100;
  bool mc_ok = true;
  double worst_z = 0.0;
  const SiteSet one = SiteSet::grid(1, 1, 1.0);
  const RngStream root(o.seed);
  int config = 0;
  double worst_rel_s = 0.0, worst_rel_k = 0.0;
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double nu : {0.25, 0.5, 1.0}) {
      MixtureModel m;
      m.gamma = gamma;
      m.nu = nu;
      m.sigma = 1.0;
      m.tau2 = 1.0;
      const SimGrid g = simulate_mixture(m, one, reps, root.split(700 + config++));
      const std::vector<double> y(g.reps.data(), g.reps.data() + g.reps.size());
      const SampleStats st = sample_stats(y);
      const SkewKurt cf = skew_kurt({gamma, nu, 1.0, 1.0});
      // Batch-means standard errors of the two estimators.
      double ss = 0.0, sk = 0.0, ss2 = 0.0, sk2 = 0.0;
      const std::size_t bsize = y.size() / batches;
      for (Eigen::Index b = 0; b < batches; ++b) {
        const std::vector<double> part(y.begin() + b * bsize, y.begin() + (b + 1) * bsize);
        const SampleStats bs = sample_stats(part);
        ss += bs.skewness;
        ss2 += bs.skewness * bs.skewness;
        sk += bs.kurtosis;
        sk2 += bs.kurtosis * bs.kurtosis;
      }
      const double nb = static_cast<double>(batches);
      const double se_s = std::sqrt((ss2 / nb - (ss / nb) * (ss / nb)) / (nb - 1.0));
      const double se_k = std::sqrt((sk2 / nb - (sk / nb) * (sk / nb)) / (nb - 1.0));
      const double rel_s = std::abs(st.skewness / cf.skewness - 1.0);
      const double rel_k = std::abs(st.kurtosis / cf.kurtosis - 1.0);
      worst_rel_s = std::max(worst_rel_s, rel_s);
      worst_rel_k = std::max(worst_rel_k, rel_k);
      const double tol_s = o.quick ? std::max(0.05, 4.0 * se_s / std::abs(cf.skewness)) : 0.05;
      const double tol_k = o.quick ? std::max(0.05, 4.0 * se_k / cf.kurtosis) : 0.05;
      worst_z = std::max({worst_z, std::abs(st.skewness - cf.skewness) / se_s,
                          std::abs(st.kurtosis - cf.kurtosis) / se_k});
      mc_ok &= out.check(rel_s <= tol_s, "gamma=" + num(gamma) + " nu=" + num(nu) + " S mc=" +
                                             num(st.skewness, 4) + " cf=" + num(cf.skewness, 4) +
                                             " rel=" + num(rel_s, 3) + " se=" + num(se_s, 3));
      mc_ok &= out.check(rel_k <= tol_k, "gamma=" + num(gamma) + " nu=" + num(nu) + " K mc=" +
                                             num(st.kurtosis, 4) + " cf=" + num(cf.kurtosis, 4) +
                                             " rel=" + num(rel_k, 3) + " se=" + num(se_k, 3));
    }
  }
  out.detail << " " << reps << " reps x 9 configs, max rel dev S " << num(worst_rel_s, 3) << " K "
             << num(worst_rel_k, 3) << " (tol 5%" << (o.quick ? " or 4 SE" : "")
             << "), max |dev|/SE " << num(worst_z, 3);
  // At 1e6 replicates the sampling error of S and K exceeds 5% of their value for
  // several configurations, so (c) can fail without any modelling error. A miss
  // counts as sampling-limited only while every deviation stays within 4 SE.
  if (exact_parts_ok && !mc_ok && worst_z <= 4.0) {
    out.known_infeasible = true;
    out.detail << "; (c) exceeds tolerance within sampling error (known infeasible at this size)";
  }
}

// Standard error of a pooled second moment, with replicates as independent units.
inline double replicate_se(const Vector& per_rep) {
  const double n = static_cast<double>(per_rep.size());
  const double m = per_rep.mean();
  return std::sqrt((per_rep.array() - m).square().sum() / (n - 1.0) / n);
}

// --- 8: stationary field moments ------------------------------------------------------
inline void field_moments(const ValidationOptions& o, Outcome& out) {
  const RngStream root(o.seed);
  SgrfModel m;
  m.mu = 2.0;
  m.sigma2 = 1.0;
  m.gamma = 1.0;
  m.tau2 = 1.0;
  m.rho_w = m.rho_delta = MaternParams{0.25, Smoothness::ThreeHalves};
  const StationaryMoments sm = stationary_moments(m);
  const Eigen::Index reps_var = o.quick ? 1000 : 10000;
  const SimGrid g = simulate_sgrf(m, SiteSet::grid(5, 5, 1.0), reps_var, root.split(800));
  const Matrix centred = g.reps.array() - g.reps.mean();
  const double n_all = static_cast<double>(g.reps.size());
  const double var = centred.squaredNorm() / (n_all - 1.0);
  const double var_se = replicate_se(centred.array().square().rowwise().mean().matrix()) ;
  const double var_rel = std::abs(var / sm.variance - 1.0);
  const double var_tol = o.quick ? std::max(0.02, 4.0 * var_se / sm.variance) : 0.02;
  out.check(var_rel <= var_tol, "variance " + num(var, 7) + " vs " + num(sm.variance, 8));

  const double pooled_mean = g.reps.mean();
  const double mean_se = replicate_se(g.reps.rowwise().mean());
  const double mean_z = std::abs(pooled_mean - m.mu) / mean_se;
  out.check(mean_z <= 3.0, "pooled mean z=" + num(mean_z, 3));

  SgrfModel m2 = m;
  m2.rho_w = m2.rho_delta = MaternParams{1.0, Smoothness::ThreeHalves};
  const Eigen::Index reps_cov = o.quick ? 10000 : 100000;
  const SimGrid g2 = simulate_sgrf(m2, SiteSet::from_points({{0.0, 0.0}, {1.0, 0.0}}), reps_cov,
                                   root.split(801));
  const EmpiricalMoments em = empirical_moments(g2);
  const double target = m2.sigma2 * 0.7357589;
  const double cov = em.covariance(0, 1);
  const Matrix c2 = g2.reps.rowwise() - g2.reps.colwise().mean();
  const double cov_se = replicate_se(c2.col(0).cwiseProduct(c2.col(1)));
  const double cov_rel = std::abs(cov / target - 1.0);
  const double cov_tol = o.quick ? std::max(0.03, 4.0 * cov_se / target) : 0.03;
  out.check(cov_rel <= cov_tol, "covariance " + num(cov, 7) + " vs " + num(target, 8));
  out.detail << "variance " << num(var, 6) << " vs " << num(sm.variance, 8) << " (rel " << num(var_rel, 3)
             << ", tol " << num(var_tol, 3) << "); cov at psi " << num(cov, 6) << " vs " << num(target, 7)
             << " (rel " << num(cov_rel, 3) << ", tol " << num(cov_tol, 3) << "); mean z " << num(mean_z, 3);
}

// --- 9: mixture limit ------------------------------------------------------------------
inline void mixture_limit(const ValidationOptions& o, Outcome& out) {
  const Eigen::Index reps = o.quick ? 10000 : 100000;
  const SiteSet sites = SiteSet::grid(3, 3, 1.0);
  const MaternParams h{1.0, Smoothness::ThreeHalves};
  SgrfModel s{0.0, 1.0, 1.0, 1.0, h, h};
  MixtureModel mx;
  mx.sigma = 1.0;
  mx.gamma = 1.0;
  mx.tau2 = 1.0;
  mx.nu = 1e-8;
  mx.matern = h;
  // The same seed gives both models the same W, delta, V and eps draws, so the
  // comparison isolates the effect of the near-degenerate scale field.
  const RngStream rng(o.seed ^ 0x9E3779B97F4A7C15ULL);
  const SimGrid a = simulate_sgrf(s, sites, reps, rng);
  const SimGrid b = simulate_mixture(mx, sites, reps, rng);
  auto pooled_var = [](const Matrix& y) {
    const Matrix c = y.array() - y.mean();
    return c.squaredNorm() / (static_cast<double>(y.size()) - 1.0);
  };
  const double va = pooled_var(a.reps), vb = pooled_var(b.reps);
  const double rel = std::abs(vb / va - 1.0);
  out.check(rel <= 0.01, "pooled variance sgrf " + num(va, 8) + " mixture " + num(vb, 8));

  // Independent streams: the same comparison without common random numbers.
  const SimGrid c = simulate_mixture(mx, sites, reps, RngStream(o.seed).split(900));
  const double vc = pooled_var(c.reps);
  out.detail << "sgrf " << num(va, 7) << " mixture " << num(vb, 7) << " rel diff " << num(rel, 3)
             << " (tol 1%); independent-stream mixture " << num(vc, 7) << " (rel "
             << num(std::abs(vc / va - 1.0), 3) << ", formula " << num(stationary_moments(s).variance, 8)
             << ")";
}

// --- 10: determinism -----------------------------------------------------------------------
inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void determinism(const ValidationOptions& o, Outcome& out) {
  namespace fs = std::filesystem;
  const fs::path base = o.scratch_dir.empty()
                            ? fs::temp_directory_path() / ("gsnrf_validate_" + std::to_string(o.seed))
                            : fs::path(o.scratch_dir);
  std::error_code ec;
  fs::remove_all(base, ec);
  auto run_pair = [&](RunConfig c, const std::string& name,
                      const std::function<std::vector<std::string>(const RunConfig&)>& fn) {
    c.output_dir = (base / (name + "_1")).string();
    const auto f1 = fn(c);
    c.output_dir = (base / (name + "_2")).string();
    const auto f2 = fn(c);
    std::size_t identical = 0;
    for (std::size_t i = 0; i < f1.size() && i < f2.size(); ++i) {
      if (slurp(f1[i]) == slurp(f2[i]) && !slurp(f1[i]).empty()) ++identical;
      else out.check(false, name + " differs: " + fs::path(f1[i]).filename().string());
    }
    out.check(f1.size() == f2.size() && !f1.empty(), name + " file count");
    return identical;
  };
  RunConfig sim;
  sim.command = Command::Simulate;
  sim.seed = o.seed;
  sim.n_reps = 200;
  sim.emit_latents = true;
  sim.model = FieldModel::Mixture;
  const std::size_t n_sim = run_pair(sim, "simulate", run_simulate);
  sim.model = FieldModel::Sgrf;
  const std::size_t n_sgrf = run_pair(sim, "simulate_sgrf", run_simulate);

  RunConfig curve;
  curve.command = Command::ChibarCurve;
  curve.seed = o.seed;
  curve.rho = 0.4;
  curve.delta1 = 1.0;
  curve.delta2 = -0.5;
  const std::size_t n_curve = run_pair(curve, "chibar", run_chibar_curve);

  // A different seed must change the simulation bytes.
  RunConfig other = sim;
  other.seed = o.seed + 1;
  other.output_dir = (base / "simulate_other").string();
  const auto f_other = run_simulate(other);
  out.check(slurp(f_other[0]) != slurp((base / "simulate_sgrf_1" / "simulate_sgrf.csv").string()),
            "seed change left simulate output unchanged");
  fs::remove_all(base, ec);
  out.detail << "byte-identical reruns: simulate mixture " << n_sim << ", sgrf " << n_sgrf
             << ", chibar-curve " << n_curve << " files";
}

struct Spec {
  int id;
  const char* name;
  double budget;
  void (*fn)(const ValidationOptions&, Outcome&);
};

inline const std::vector<Spec>& criteria() {
  static const std::vector<Spec> specs = {
      {1, "density normalization", 30, density_normalization},
      {2, "sampler fidelity", 60, sampler_fidelity},
      {3, "marginal KS", 60, marginal_ks},
      {4, "Gaussian tail reduction", 10, gaussian_reduction},
      {5, "proposition 1", 60, proposition_one},
      {6, "chibar battery", 300, chibar_battery},
      {7, "moment formulas", 180, moment_formulas},
      {8, "stationary field moments", 120, field_moments},
      {9, "mixture limit", 120, mixture_limit},
      {10, "determinism", 60, determinism}};
  return specs;
}

}  // namespace validation

/// Runs one criterion; exceptions count as failures. A criterion whose checks
/// pass but which overruns its runtime budget also fails.
inline CriterionResult run_criterion(int id, const ValidationOptions& o) {
  for (const auto& s : validation::criteria()) {
    if (s.id != id) continue;
    CriterionResult r{id, s.name, false, false, "", 0.0, s.budget};
    validation::Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      s.fn(o, out);
    } catch (const std::exception& e) {
      out.fail();
      out.detail << "exception: " << e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.passed = out.passed && r.seconds < s.budget;
    r.known_infeasible = !r.passed && out.known_infeasible && r.seconds < s.budget;
    r.detail = out.detail.str();
    if (r.seconds >= s.budget) r.detail += "; runtime over budget";
    return r;
  }
  throw DomainError("run_criterion: no criterion " + std::to_string(id));
}

inline std::string format_result(const CriterionResult& r) {
  char head[200];
  std::snprintf(head, sizeof head, "[%s] criterion %2d %-26s %7.2fs (budget %.0fs) ",
                r.passed ? "PASS" : (r.known_infeasible ? "FAIL (known infeasible)" : "FAIL"), r.id, r.name.c_str(), r.seconds, r.budget_seconds);
  return head + r.detail;
}

/// Runs all criteria in order, streaming one line per criterion to `log`.
inline std::vector<CriterionResult> run_acceptance(const ValidationOptions& o, std::ostream* log = nullptr) {
  std::vector<CriterionResult> results;
  for (const auto& s : validation::criteria()) {
    results.push_back(run_criterion(s.id, o));
    if (log) *log << format_result(results.back()) << std::endl;
  }
  return results;
}

}  // namespace gsnrf
