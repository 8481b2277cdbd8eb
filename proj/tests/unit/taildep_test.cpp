#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gsnrf/taildep.hpp"

using namespace gsnrf;

namespace {

struct SurvivalCase {
  double rho, d1, d2, u, survival, chibar;
};

// Independent oracle: direct 2-D quadrature of the pair density (compute_oracles.py).
const SurvivalCase kSurvival[] = {
    {0.4, 2.0, 1.0, 0.95, 0.004105660856640431, 0.090271321272821},
    {0.8, 1.0, 0.5, 0.99, 0.0011979967666022936, 0.36913889203023986},
    {0.4, -1.0, 1.0, 0.999, 1.724528019342643e-05, 0.2596230622646911},
};

// Bivariate normal reference, from scipy's multivariate normal cdf.
const SurvivalCase kNormal[] = {
    {0.4, 0, 0, 0.9, 0.026653507473015245, 0.2704497694496555},
    {0.4, 0, 0, 0.99, 0.0008658658265216361, 0.30610138055349645},
    {0.4, 0, 0, 0.999, 2.944730921037955e-05, 0.324224322819165},
    {0.8, 0, 0, 0.9, 0.05624273674472788, 0.6000850542339871},
    {0.8, 0, 0, 0.99, 0.0037689681631223565, 0.6503164786082034},
    {0.8, 0, 0, 0.999, 0.00026347235225612314, 0.6763218375287661},
};

}  // namespace

TEST(PairLaw, IsCentredWithUnitScaleCorrelation) {
  for (auto root : {RootKind::Symmetric, RootKind::Cholesky}) {
    const GsnParams p = build_pair({0.6, 1.5, -0.5}, root);
    const Moments m = closed_moments(p);
    EXPECT_NEAR(m.mean(0), 0.0, 1e-15);
    EXPECT_NEAR(m.mean(1), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(p.sigma()(0, 1), 0.6);
    EXPECT_DOUBLE_EQ(p.sigma()(1, 1), 1.0);
  }
  // The Cholesky root leaves the first shape untouched.
  EXPECT_DOUBLE_EQ(build_pair({0.6, 1.5, -0.5}, RootKind::Cholesky).delta()(0), 1.5);
}

TEST(Survival, MatchesOracle) {
  for (const auto& c : kSurvival) {
    const TailMeasures t = dependence_measures({c.rho, c.d1, c.d2}, c.u);
    EXPECT_NEAR(t.chi * (1.0 - c.u) / c.survival, 1.0, 1e-9) << c.rho << ' ' << c.d1 << ' ' << c.d2;
    EXPECT_NEAR(t.chibar, c.chibar, 1e-9);
    EXPECT_EQ(t.flag, TailFlag::Ok);
  }
}

TEST(Survival, ZeroShapeReducesToBivariateNormal) {
  for (const auto& c : kNormal) {
    const TailMeasures t = dependence_measures({c.rho, 0.0, 0.0}, c.u);
    EXPECT_NEAR(t.chi * (1.0 - c.u) / c.survival, 1.0, 1e-10);
    EXPECT_NEAR(t.chibar, c.chibar, 1e-10);
    const double q = normal_quantile(c.u);
    EXPECT_NEAR(joint_survival(build_pair({c.rho, 0, 0}), q, q).value / bvn_survival(q, q, c.rho),
                1.0, 1e-10);
  }
}

TEST(Survival, IndependenceGivesProductAndZeroChibar) {
  for (double u : {0.1, 0.5, 0.9, 0.9999}) {
    const TailMeasures t = dependence_measures({0.0, 0.0, 0.0}, u);
    EXPECT_NEAR(t.chi, 1.0 - u, 1e-12 * (1.0 - u) + 1e-15);
    EXPECT_NEAR(t.chibar, 0.0, 1e-9);
  }
}

TEST(Survival, LowerOrthantComplementsUpper) {
  const GsnParams p = build_pair({0.5, 1.0, -2.0});
  const UnivariateGsn m1 = marginal(p, 0), m2 = marginal(p, 1);
  for (double z : {-1.0, 0.0, 0.7}) {
    const double both_low = joint_cdf(p, z, z).value;
    const double both_high = joint_survival(p, z, z).value;
    // Inclusion-exclusion: P(both high) = 1 - F1 - F2 + P(both low).
    EXPECT_NEAR(both_high, 1.0 - marginal_cdf(m1, z) - marginal_cdf(m2, z) + both_low, 1e-11);
  }
}

TEST(Survival, ExchangeSymmetry) {
  for (double rho : {0.4, 0.8}) {
    for (auto [a, b] : {std::pair{2.0, -0.5}, {1.0, 0.5}, {-1.0, 0.0}}) {
      for (double u : {0.2, 0.9, 0.999}) {
        const double x = dependence_measures({rho, a, b}, u).chibar;
        const double y = dependence_measures({rho, b, a}, u).chibar;
        EXPECT_NEAR(x, y, 1e-10) << rho << ' ' << a << ' ' << b << ' ' << u;
      }
    }
  }
}

TEST(Survival, AgreesWithMonteCarlo) {
  const TailPairParams tp{0.6, 1.5, -0.5};
  const GsnParams p = build_pair(tp);
  const double u = 0.95;
  const double q1 = marginal_quantile(marginal(p, 0), u);
  const double q2 = marginal_quantile(marginal(p, 1), u);
  RngStream rng(2024);
  const Eigen::Index n = 1000000;
  const Matrix draws = sample(p, n, rng);
  const double hits =
      static_cast<double>(((draws.col(0).array() > q1) && (draws.col(1).array() > q2)).count());
  const double want = joint_survival(p, q1, q2).value;
  const double se = std::sqrt(want * (1.0 - want) / static_cast<double>(n));
  EXPECT_NEAR(hits / static_cast<double>(n), want, 4.0 * se);
}

TEST(Survival, ComonotoneLimitIncreasesWithRho) {
  double prev = -1.0;
  for (double rho : {-0.8, -0.3, 0.0, 0.3, 0.6, 0.9}) {
    const double x = dependence_measures({rho, 0.0, 0.0}, 0.99).chibar;
    EXPECT_GT(x, prev);
    prev = x;
  }
}

TEST(Survival, CholeskyRootChangesTheLaw) {
  const double sym = dependence_measures({0.8, 2.0, 0.0}, 0.99, RootKind::Symmetric).chibar;
  const double chol = dependence_measures({0.8, 2.0, 0.0}, 0.99, RootKind::Cholesky).chibar;
  EXPECT_GT(std::abs(sym - chol), 1e-3);
  // With no skewness the root is irrelevant.
  EXPECT_NEAR(dependence_measures({0.8, 0, 0}, 0.99, RootKind::Cholesky).chibar,
              dependence_measures({0.8, 0, 0}, 0.99).chibar, 1e-12);
}

TEST(Survival, ProbabilityIntegralTransformIsUniform) {
  const GsnParams p = build_pair({0.4, -1.0, 2.0});
  for (Eigen::Index i : {0, 1}) {
    const UnivariateGsn m = marginal(p, i);
    for (double u : {1e-6, 0.05, 0.5, 0.95, 1 - 1e-6}) {
      const double x = marginal_quantile(m, u);
      EXPECT_NEAR(marginal_cdf(m, x), u, 1e-8);
    }
  }
}

TEST(Measures, StayInRangeOverTheGrid) {
  const auto grid = default_u_grid();
  const CurveSeries s = chibar_curve({0.8, 2.0, -1.0}, grid);
  ASSERT_EQ(s.rows.size(), grid.size());
  for (const auto& r : s.rows) {
    EXPECT_NE(r.flag, TailFlag::OutOfRange);
    EXPECT_GE(r.chibar, -1.0);
    EXPECT_LE(r.chibar, 1.0);
    EXPECT_GE(r.chi, 0.0);
  }
  EXPECT_EQ(s.rows.front().flag, TailFlag::Boundary);
  EXPECT_EQ(s.rows.back().flag, TailFlag::Boundary);
  EXPECT_STREQ(to_string(TailFlag::Boundary), "clipped");
}

TEST(Measures, ChiDecaysForAsymptoticallyIndependentPair) {
  const TailPairParams p{0.4, 0.5, 1.0};
  ASSERT_EQ(classify_prop1(p.rho, p.delta1, p.delta2), TailClass::AsymptoticallyIndependentA);
  double prev = 1.0;
  for (double u : {0.99, 0.999, 0.9999, 0.99999}) {
    const double chi = dependence_measures(p, u).chi;
    EXPECT_LT(chi, prev);
    prev = chi;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Measures, RejectInvalidInput) {
  EXPECT_THROW(dependence_measures({1.0, 0, 0}, 0.5), DomainError);
  EXPECT_THROW(dependence_measures({0.5, 0, 0, 0.6}, 0.5), DomainError);
  EXPECT_THROW(dependence_measures({0.5, NAN, 0}, 0.5), DomainError);
  EXPECT_THROW(dependence_measures({0.5, 0, 0}, 1e-12), DomainError);
  EXPECT_THROW(dependence_measures({0.5, 0, 0}, 1.0), DomainError);
  EXPECT_THROW(chibar_curve({0.5, 0, 0}, {0.5, 0.4}), DomainError);
  EXPECT_THROW(default_u_grid(1e-9, 1), DomainError);
}

TEST(Grid, IsSymmetricInLogitAndHitsTheWindow) {
  const auto g = default_u_grid(1e-9, 200);
  ASSERT_EQ(g.size(), 200u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-9);
  EXPECT_DOUBLE_EQ(g.back(), 1.0 - 1e-9);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    EXPECT_NEAR(g[i] + g[g.size() - 1 - i], 1.0, 1e-12);
  }
}

TEST(Threshold, KnownValuesAndLimits) {
  EXPECT_NEAR(prop1_threshold(0.8, 0.0).value, 0.35355339059327371, 1e-15);
  // rho -> 1 with delta2 = 0 collapses the interval.
  EXPECT_NEAR(prop1_threshold(0.999999, 0.0).value, 0.0, 1e-3);
  EXPECT_TRUE(std::isinf(prop1_threshold(0.0, 1.0).value));
  EXPECT_TRUE(std::isinf(prop1_threshold(-0.5, 1.0).value));
  // Small rho makes the threshold large.
  EXPECT_GT(prop1_threshold(0.01, 0.0).value, 7.0);
  // Increasing in delta2.
  EXPECT_LT(prop1_threshold(0.5, 0.5).value, prop1_threshold(0.5, 1.5).value);
  EXPECT_THROW(prop1_threshold(1.0, 0.0), DomainError);
}

TEST(Classifier, CaseTable) {
  const double t = prop1_threshold(0.8, 0.0).value;
  EXPECT_EQ(classify_prop1(0.8, 0.0, 0.0), TailClass::AsymptoticallyIndependentA);
  EXPECT_EQ(classify_prop1(0.8, 0.5, 1.0), TailClass::AsymptoticallyIndependentA);
  EXPECT_EQ(classify_prop1(0.8, -1.0, -2.0), TailClass::AsymptoticallyIndependentA);
  EXPECT_EQ(classify_prop1(0.8, -1.0, 2.0), TailClass::AsymptoticallyIndependentA);
  EXPECT_EQ(classify_prop1(0.8, 0.3, 0.0), TailClass::AsymptoticallyIndependentB);
  EXPECT_EQ(classify_prop1(0.8, t, 0.0), TailClass::Indeterminate);
  EXPECT_EQ(classify_prop1(0.8, 1.0, 0.0), TailClass::Indeterminate);
  EXPECT_EQ(classify_prop1(0.8, 1.0, -0.5), TailClass::Indeterminate);
  EXPECT_EQ(classify_prop1(-0.5, 5.0, 0.0), TailClass::AsymptoticallyIndependentB);
  EXPECT_STREQ(to_string(TailClass::Indeterminate), "indeterminate");
  EXPECT_THROW(classify_prop1(-1.0, 0, 0), DomainError);
}

TEST(Measures, NearComonotoneNormalApproachesOne) {
  double prev = -1.0;
  for (double rho : {0.5, 0.9, 0.99, 0.999}) {
    const double x = dependence_measures({rho, 0.0, 0.0}, 0.9).chibar;
    EXPECT_GT(x, prev);
    prev = x;
  }
  EXPECT_GT(prev, 0.95);
}
