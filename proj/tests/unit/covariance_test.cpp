#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gsnrf/covariance.hpp"
#include "gsnrf/numerics/rng.hpp"

using namespace gsnrf;

TEST(Matern, ClosedFormsAtUnitDistance) {
  // At d = psi: e^-1, 2 e^-1 and (7/3) e^-1.
  const double e1 = std::exp(-1.0);
  EXPECT_NEAR(matern_rho(1.0, {1.0, Smoothness::Half}), e1, 1e-16);
  EXPECT_NEAR(matern_rho(1.0, {1.0, Smoothness::ThreeHalves}), 0.73575888234288464319, 1e-16);
  EXPECT_NEAR(matern_rho(2.0, {2.0, Smoothness::FiveHalves}), 7.0 / 3.0 * e1, 1e-15);
}

TEST(Matern, UnitAtZeroAndDecreasing) {
  for (auto xi : {Smoothness::Half, Smoothness::ThreeHalves, Smoothness::FiveHalves}) {
    const MaternParams p{0.7, xi};
    EXPECT_DOUBLE_EQ(matern_rho(0.0, p), 1.0);
    double prev = 1.0;
    for (double d = 0.05; d < 10.0; d += 0.05) {
      const double r = matern_rho(d, p);
      EXPECT_LT(r, prev);
      EXPECT_GT(r, 0.0);
      prev = r;
    }
    EXPECT_LT(matern_rho(20.0 * 0.7, p), 1e-5);
  }
}

TEST(Matern, SmootherMeansMoreCorrelatedAtShortRange) {
  const double d = 0.3;
  EXPECT_LT(matern_rho(d, {1.0, Smoothness::Half}), matern_rho(d, {1.0, Smoothness::ThreeHalves}));
  EXPECT_LT(matern_rho(d, {1.0, Smoothness::ThreeHalves}),
            matern_rho(d, {1.0, Smoothness::FiveHalves}));
}

TEST(Matern, RejectsBadArguments) {
  EXPECT_THROW(matern_rho(1.0, {0.0, Smoothness::Half}), DomainError);
  EXPECT_THROW(matern_rho(1.0, {-1.0, Smoothness::Half}), DomainError);
  EXPECT_THROW(matern_rho(-0.1, {1.0, Smoothness::Half}), DomainError);
  EXPECT_THROW(smoothness_from(1.0), DomainError);
  EXPECT_EQ(smoothness_from(2.5), Smoothness::FiveHalves);
  EXPECT_DOUBLE_EQ(smoothness_value(Smoothness::Half), 0.5);
}

TEST(CorrMatrix, GridMatrixIsExactAndFactorsWithoutJitter) {
  const SiteSet sites = SiteSet::grid(4, 3, 0.5);
  ASSERT_EQ(sites.size(), 12u);
  const MaternParams p{1.0, Smoothness::ThreeHalves};
  const CorrelationMatrix c = corr_matrix(sites, p);
  EXPECT_EQ(c.jitter, 0.0);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = 0; j < sites.size(); ++j) {
      EXPECT_DOUBLE_EQ(c.h(i, j), matern_rho(sites.distance(i, j), p));
    }
  }
  EXPECT_LT(reconstruction_error(c.h.chol(), c.h.matrix()), 1e-14);
}

TEST(CorrMatrix, DuplicateSitesNeedJitter) {
  const SiteSet sites = SiteSet::from_points({{0, 0}, {0, 0}, {1, 0}});
  const CorrelationMatrix c = corr_matrix(sites, {1.0, Smoothness::Half});
  EXPECT_GT(c.jitter, 0.0);
  EXPECT_LE(c.jitter, kMaxJitter);
  EXPECT_DOUBLE_EQ(c.h(0, 0), 1.0 + c.jitter);
}

TEST(CorrMatrix, EmptySiteSetIsRejected) {
  EXPECT_THROW(corr_matrix(SiteSet{}, {}), DomainError);
}

TEST(Sites, ParsesCsvInOrder) {
  std::istringstream in("site_id,x,y\r\nb,1.5,2\n\na,-3,0.25\n");
  const SiteSet s = read_sites_csv(in);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].id, "b");
  EXPECT_EQ(s[1].id, "a");
  EXPECT_DOUBLE_EQ(s[1].x, -3.0);
  EXPECT_NEAR(s.distance(0, 1), std::hypot(4.5, 1.75), 1e-15);
}

TEST(Sites, RejectsMalformedCsv) {
  std::istringstream bad_header("id,x,y\n0,1,2\n");
  EXPECT_THROW(read_sites_csv(bad_header), DomainError);
  std::istringstream bad_coord("site_id,x,y\n0,1,two\n");
  EXPECT_THROW(read_sites_csv(bad_coord), DomainError);
  std::istringstream short_row("site_id,x,y\n0,1\n");
  EXPECT_THROW(read_sites_csv(short_row), DomainError);
  std::istringstream nonfinite("site_id,x,y\n0,inf,1\n");
  EXPECT_THROW(read_sites_csv(nonfinite), DomainError);
  EXPECT_THROW(read_sites_csv(std::string("/nonexistent/sites.csv")), DomainError);
}

TEST(CorrMatrix, SmallCasesAndStructure) {
  const CorrelationMatrix one = corr_matrix(SiteSet::from_points({{3, 4}}), {});
  EXPECT_EQ(one.h.matrix(), Matrix::Identity(1, 1));
  const CorrelationMatrix two = corr_matrix(SiteSet::from_points({{0, 0}, {2, 0}}), {2.0});
  EXPECT_NEAR(two.h(0, 1), 0.7357589, 5e-8);
  const CorrelationMatrix g = corr_matrix(SiteSet::grid(5, 5, 0.3), {0.8, Smoothness::FiveHalves});
  EXPECT_EQ(g.h.matrix(), g.h.matrix().transpose());
  EXPECT_TRUE((g.h.matrix().diagonal().array() == 1.0).all());
}

TEST(CorrMatrix, InvariantUnderJointScaling) {
  RngStream rng(8);
  std::vector<std::pair<double, double>> pts, scaled;
  const double c = 3.7;
  for (int i = 0; i < 30; ++i) {
    const double x = rng.uniform(), y = rng.uniform();
    pts.emplace_back(x, y);
    scaled.emplace_back(c * x, c * y);
  }
  for (auto xi : {Smoothness::Half, Smoothness::ThreeHalves, Smoothness::FiveHalves}) {
    const Matrix a = corr_matrix(SiteSet::from_points(pts), {0.4, xi}).h.matrix();
    const Matrix b = corr_matrix(SiteSet::from_points(scaled), {0.4 * c, xi}).h.matrix();
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(CorrMatrix, RandomSitesFactorWithLittleJitter) {
  RngStream rng(200);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 200; ++i) pts.emplace_back(rng.uniform(), rng.uniform());
  const CorrelationMatrix c = corr_matrix(SiteSet::from_points(pts), {0.2, Smoothness::ThreeHalves});
  EXPECT_LE(c.jitter, 1e-8);
  EXPECT_LT(reconstruction_error(c.h.chol(), c.h.matrix()), 1e-12);
}
