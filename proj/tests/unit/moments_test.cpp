#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gsnrf/moments.hpp"

using namespace gsnrf;

namespace {

struct MomentCase {
  double gamma, nu, tau, sigma, skewness, kurtosis;
};

// tests/oracles/moment_oracle.py: conditions on (lambda, delta, V) and
// integrates the conditional normal central moments by quadrature, with no
// reference to the closed form.
const MomentCase kOracle[] = {
    {1.0, 0.5, 1.0, 1.0, 0.295134806221322, 5.13322989601029},
    {-2.0, 1.0, 0.5, 2.0, -0.548199892505457, 11.1495176294346},
    {100.0, 0.0, 1.0, 1.0, 1.40694598779345, 9.66927206876896},
    {0.5, 0.25, 1.0, 1.0, 0.0436135543343045, 3.38315883780133},
    {2.0, 1.0, 1.0, 1.0, 1.14842289881623, 15.6938129936863},
};

}  // namespace

TEST(SkewKurt, MatchesQuadratureOracle) {
  for (const auto& c : kOracle) {
    const SkewKurt v = skew_kurt({c.gamma, c.nu, c.tau, c.sigma});
    EXPECT_NEAR(v.skewness, c.skewness, 1e-10 * std::max(1.0, std::abs(c.skewness))) << c.gamma;
    EXPECT_NEAR(v.kurtosis, c.kurtosis, 1e-10 * c.kurtosis) << c.gamma;
  }
}

TEST(SkewKurt, GaussianCaseAndLimits) {
  const SkewKurt g = skew_kurt({0.0, 0.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(g.skewness, 0.0);
  EXPECT_DOUBLE_EQ(g.kurtosis, 3.0);
  // With nu = 0 the ranges approach (-1.41, 1.41) and (3, 9.67) as |gamma| grows.
  const SkewKurt big = skew_kurt({1e4, 0.0, 1.0, 1.0});
  const double a = 1.0 - 2.0 / std::numbers::pi;
  const double mu3 = std::sqrt(2.0 / std::numbers::pi) * (4.0 / std::numbers::pi - 1.0);
  const double mu4 = 3.0 - 4.0 / std::numbers::pi - 12.0 / (std::numbers::pi * std::numbers::pi);
  EXPECT_NEAR(big.skewness, 4.0 * mu3 / std::pow(2.0 * a, 1.5), 1e-6);
  EXPECT_NEAR(big.kurtosis, 10.0 * mu4 / (4.0 * a * a), 1e-6);
  EXPECT_NEAR(big.skewness, 1.41, 0.005);
  EXPECT_NEAR(big.kurtosis, 9.67, 0.005);
}

TEST(SkewKurt, OddInGammaExactly) {
  for (double nu : default_nu_grid()) {
    for (double g : {0.1, 0.7, 2.3, 5.0}) {
      const SkewKurt p = skew_kurt({g, nu, 1.0, 1.0});
      const SkewKurt m = skew_kurt({-g, nu, 1.0, 1.0});
      EXPECT_EQ(m.skewness, -p.skewness);
      EXPECT_EQ(m.kurtosis, p.kurtosis);
    }
  }
}

TEST(SkewKurt, RespectsMomentInequality) {
  for (const auto& row : moment_surface(default_gamma_grid(), default_nu_grid())) {
    EXPECT_GE(row.value.kurtosis, row.value.skewness * row.value.skewness + 1.0);
    EXPECT_GE(row.value.kurtosis, 3.0 - 1e-12);
  }
}

TEST(SkewKurt, DampedByNugget) {
  for (double nu : {0.0, 0.5, 1.0, 2.0}) {
    for (double g : {-3.0, 0.2, 1.0, 4.0}) {
      SkewKurt prev = skew_kurt({g, nu, 0.0, 1.0});
      for (double tau = 0.25; tau <= 10.0; tau += 0.25) {
        const SkewKurt v = skew_kurt({g, nu, tau, 1.0});
        EXPECT_LE(std::abs(v.skewness), std::abs(prev.skewness) + 1e-15);
        EXPECT_LE(v.kurtosis, prev.kurtosis + 1e-12) << g << ' ' << nu << ' ' << tau;
        prev = v;
      }
    }
  }
}

TEST(SkewKurt, SkewnessDampedByScale) {
  for (double nu : {0.0, 0.5, 1.0, 2.0}) {
    for (double g : {-3.0, 0.2, 1.0, 4.0}) {
      double prev = std::abs(skew_kurt({g, nu, 1.0, 0.05}).skewness);
      for (double sigma = 0.1; sigma <= 10.0; sigma += 0.05) {
        const double s = std::abs(skew_kurt({g, nu, 1.0, sigma}).skewness);
        EXPECT_LE(s, prev + 1e-15);
        prev = s;
      }
    }
  }
}

TEST(SkewKurt, KurtosisDampedByScaleOnlyWithoutMixing) {
  for (double g : {-3.0, 0.2, 1.0, 4.0}) {
    double prev = skew_kurt({g, 0.0, 1.0, 0.05}).kurtosis;
    for (double sigma = 0.1; sigma <= 10.0; sigma += 0.05) {
      const double k = skew_kurt({g, 0.0, 1.0, sigma}).kurtosis;
      EXPECT_LE(k, prev + 1e-12);
      prev = k;
    }
  }
  // With nu > 0 the scale term is itself heavy-tailed: K tends to 3 e^nu as
  // sigma grows, so for small |gamma| it rises with sigma.
  const double nu = 0.5;
  EXPECT_NEAR(skew_kurt({0.2, nu, 1.0, 1e4}).kurtosis, 3.0 * std::exp(nu), 1e-6);
  EXPECT_GT(skew_kurt({0.2, nu, 1.0, 2.0}).kurtosis, skew_kurt({0.2, nu, 1.0, 0.5}).kurtosis);
}

TEST(SkewKurt, KurtosisGrowsWithNu) {
  double prev = 0.0;
  for (double nu : {0.0, 0.5, 1.0}) {
    const double k = skew_kurt({1.0, nu, 1.0, 1.0}).kurtosis;
    EXPECT_GT(k, prev);
    prev = k;
  }
}

TEST(SkewKurt, RejectsInvalidParameters) {
  EXPECT_THROW(skew_kurt({1.0, -0.1, 1.0, 1.0}), DomainError);
  EXPECT_THROW(skew_kurt({1.0, 0.0, -1.0, 1.0}), DomainError);
  EXPECT_THROW(skew_kurt({1.0, 0.0, 1.0, 0.0}), DomainError);
  EXPECT_THROW(skew_kurt({NAN, 0.0, 1.0, 1.0}), DomainError);
  EXPECT_THROW(skew_kurt({1.0, INFINITY, 1.0, 1.0}), DomainError);
}

TEST(Surface, ShapeOrderAndAntisymmetry) {
  const auto g = default_gamma_grid();
  const auto n = default_nu_grid();
  ASSERT_EQ(g.size(), 101u);
  EXPECT_EQ(g[50], 0.0);
  const auto rows = moment_surface(g, n);
  ASSERT_EQ(rows.size(), 505u);
  EXPECT_EQ(rows[0].params.gamma, -5.0);
  EXPECT_EQ(rows[1].params.gamma, -5.0);
  EXPECT_EQ(rows[1].params.nu, 0.25);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < n.size(); ++j) {
      const auto& a = rows[i * n.size() + j];
      const auto& b = rows[(g.size() - 1 - i) * n.size() + j];
      EXPECT_EQ(a.value.skewness, -b.value.skewness);
    }
  }
  const auto single = moment_surface({0.0}, {0.0});
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].value.skewness, 0.0);
  EXPECT_EQ(single[0].value.kurtosis, 3.0);
  EXPECT_THROW(moment_surface({}, {0.0}), DomainError);
}
