#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ncar/diagnostics.hpp"
#include "ncar/error.hpp"
#include "ncar/portmanteau.hpp"
#include "ncar/rng.hpp"
#include "ncar/stable.hpp"
#include "oracles.hpp"

namespace {

using ncar::CorrelationKind;
using ncar::CorrelationVector;
using ncar::Statistic;

CorrelationVector cv(std::vector<double> v, std::size_t n, CorrelationKind kind) { return {std::move(v), n, kind}; }

TEST(LjungBox, WorkedExample) {
  const auto r = ncar::q_ljung_box(cv({0.1, -0.05}, 100, CorrelationKind::trimmed_acf), 2);
  EXPECT_NEAR(r.statistic, 100.0 * 102.0 * (0.01 / 99.0 + 0.0025 / 98.0), 1e-12);
  EXPECT_NEAR(r.statistic, 1.2905, 1e-4);
  EXPECT_EQ(r.name, Statistic::Q_lb);
  EXPECT_EQ(r.m, 2u);
  EXPECT_NEAR(r.p_value, oracle::chisq_sf(r.statistic, 2.0), 1e-12);
}

TEST(Monti, SameArithmeticOnPartials) {
  const auto r = ncar::q_monti(cv({0.1, -0.05}, 100, CorrelationKind::pacf), 2);
  EXPECT_NEAR(r.statistic, 1.2905, 1e-4);
  EXPECT_EQ(r.distribution.family, ncar::ReferenceDistribution::Family::chi_square);
  EXPECT_EQ(r.distribution.df, 2.0);
}

TEST(WeightedBoxPierce, WorkedExampleAndSingleLag) {
  const auto r = ncar::q_box_pierce_weighted(cv({0.1, -0.05}, 100, CorrelationKind::trimmed_acf), 2);
  EXPECT_NEAR(r.statistic, 1.125, 1e-12);
  const auto one = ncar::q_box_pierce_weighted(cv({0.2}, 50, CorrelationKind::trimmed_acf), 1);
  EXPECT_NEAR(one.statistic, 50.0 * 0.04, 1e-12);
  // Weight (1) makes the gamma reference exactly chi-square with one df.
  EXPECT_NEAR(one.p_value, oracle::chisq_sf(2.0, 1.0), 1e-12);
}

TEST(WeightedLjungBox, WorkedExampleAndGammaParameters) {
  const auto r = ncar::q_ljung_box_weighted(cv({0.1, -0.05}, 100, CorrelationKind::trimmed_acf), 2);
  EXPECT_NEAR(r.statistic, 100.0 * 102.0 * (0.01 / 99.0 + 0.5 * 0.0025 / 98.0), 1e-12);
  EXPECT_NEAR(r.statistic, 1.16041, 1e-5);
  EXPECT_EQ(r.distribution.family, ncar::ReferenceDistribution::Family::gamma);
  EXPECT_NEAR(r.distribution.shape, 0.9, 1e-15);
  EXPECT_NEAR(r.distribution.scale, 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.p_value, oracle::gamma_sf(r.statistic, 0.9, 5.0 / 3.0), 1e-12);
}

TEST(WeightedMonti, MirrorsWeightedLjungBox) {
  const auto a = ncar::q_ljung_box_weighted(cv({0.1, -0.05, 0.02}, 90, CorrelationKind::trimmed_acf), 3);
  const auto b = ncar::q_monti_weighted(cv({0.1, -0.05, 0.02}, 90, CorrelationKind::pacf), 3);
  EXPECT_EQ(a.statistic, b.statistic);
  EXPECT_EQ(a.p_value, b.p_value);
  EXPECT_EQ(b.name, Statistic::Q_wm);
}

TEST(GvTest, DegreesOfFreedomAndDenseDeterminant) {
  const auto acf = cv({0.5, 0.25}, 100, CorrelationKind::trimmed_acf);
  const auto r = ncar::q_gvtest(acf, 2);
  EXPECT_NEAR(r.distribution.df, 1.8, 1e-15);
  const double det = oracle::toeplitz(acf.values, 2).determinant();
  EXPECT_NEAR(r.statistic, -3.0 * 100.0 / 5.0 * std::log(det), 1e-10);
  EXPECT_NEAR(r.p_value, oracle::chisq_sf(r.statistic, 1.8), 1e-12);
}

TEST(GvTest, LogDetIdentityOnRandomPositiveDefiniteAcfs) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    ncar::Rng rng(seed);
    const std::size_t m = 1 + rng.below(20);
    std::vector<double> pacf(m);
    for (double& v : pacf) v = rng.uniform(-0.95, 0.95);
    const auto acf = cv(oracle::acf_from_pacf(pacf), 500, CorrelationKind::trimmed_acf);
    EXPECT_NEAR(ncar::toeplitz_log_det(acf, m), oracle::toeplitz_log_det(acf.values, m), 1e-10) << seed;
    // The rounded acf defines its own pacf; compare with a dense solve on the same input.
    const auto back = ncar::pacf_from_acf(acf, m);
    const auto dense = oracle::pacf_dense(acf.values, m);
    for (std::size_t k = 0; k < m; ++k) EXPECT_NEAR(back.values[k], dense[k], 1e-11) << seed << " k=" << k;
  }
}

TEST(GvTest, NotPositiveDefinite) {
  EXPECT_THROW((void)ncar::q_gvtest(cv({0.99, -0.99}, 100, CorrelationKind::trimmed_acf), 2), ncar::NotPositiveDefinite);
  EXPECT_THROW((void)ncar::q_gvtest(cv({1.0, 1.0}, 100, CorrelationKind::trimmed_acf), 2), ncar::NotPositiveDefinite);
}

TEST(RankTests, WorkedExample) {
  const auto r = ncar::q_rank(cv({0.01}, 900, CorrelationKind::rank), 1);
  EXPECT_NEAR(r.statistic, 12.96, 1e-12);
  EXPECT_NEAR(r.p_value, oracle::chisq_sf(12.96, 1.0), 1e-14);
  EXPECT_NEAR(r.p_value, 3.2e-4, 0.1e-4);
  const auto s = ncar::q_rank_squared(cv({0.01}, 900, CorrelationKind::rank_squared), 1);
  EXPECT_EQ(s.statistic, r.statistic);
  EXPECT_EQ(s.name, Statistic::Q_rks);
}

TEST(AllStatistics, ZeroCorrelationsGiveZeroAndUnitPValue) {
  const std::vector<double> z(5, 0.0);
  const std::vector<ncar::TestReport> reports = {
      ncar::q_ljung_box(cv(z, 100, CorrelationKind::trimmed_acf), 5),
      ncar::q_monti(cv(z, 100, CorrelationKind::pacf), 5),
      ncar::q_gvtest(cv(z, 100, CorrelationKind::trimmed_acf), 5),
      ncar::q_box_pierce_weighted(cv(z, 100, CorrelationKind::trimmed_acf), 5),
      ncar::q_ljung_box_weighted(cv(z, 100, CorrelationKind::trimmed_acf), 5),
      ncar::q_monti_weighted(cv(z, 100, CorrelationKind::pacf), 5),
      ncar::q_rank(cv(z, 100, CorrelationKind::rank), 5),
      ncar::q_rank_squared(cv(z, 100, CorrelationKind::rank_squared), 5),
  };
  for (const auto& r : reports) {
    EXPECT_EQ(r.statistic, 0.0) << ncar::to_string(r.name);
    EXPECT_FALSE(std::signbit(r.statistic));
    EXPECT_EQ(r.p_value, 1.0) << ncar::to_string(r.name);
  }
}

TEST(AllStatistics, MonotoneInEachCorrelation) {
  std::vector<double> base{0.05, -0.1, 0.02, 0.0};
  for (std::size_t k = 0; k < base.size(); ++k) {
    double prev_lb = -1.0, prev_wb = -1.0, prev_wl = -1.0;
    for (double mag : {0.0, 0.01, 0.05, 0.2, 0.5}) {
      std::vector<double> v = base;
      v[k] = (k % 2 ? -1.0 : 1.0) * mag;
      const auto acf = cv(v, 200, CorrelationKind::trimmed_acf);
      const double lb = ncar::q_ljung_box(acf, 4).statistic;
      const double wb = ncar::q_box_pierce_weighted(acf, 4).statistic;
      const double wl = ncar::q_ljung_box_weighted(acf, 4).statistic;
      EXPECT_GE(lb, prev_lb);
      EXPECT_GE(wb, prev_wb);
      EXPECT_GE(wl, prev_wl);
      prev_lb = lb;
      prev_wb = wb;
      prev_wl = wl;
    }
  }
}

TEST(AllStatistics, InputValidation) {
  const auto acf = cv({0.1, 0.2}, 100, CorrelationKind::trimmed_acf);
  EXPECT_THROW((void)ncar::q_monti(acf, 2), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::q_rank(acf, 2), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::q_ljung_box(acf, 3), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::q_ljung_box(acf, 0), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::q_ljung_box(cv({0.1, 0.2}, 2, CorrelationKind::trimmed_acf), 2), ncar::InvalidArgument);
}

TEST(WeightedChiSquare, GammaApproximation) {
  const std::vector<double> one{1.0};
  EXPECT_NEAR(ncar::weighted_chisq_cdf(3.841458820694124, one), 0.95, 1e-12);
  const std::vector<double> three{1.0, 1.0, 1.0};
  EXPECT_NEAR(ncar::weighted_chisq_cdf(7.814727903251179, three), 0.95, 1e-12);
  const auto g = ncar::weighted_chisq_gamma(ncar::linear_weights(2));
  EXPECT_NEAR(g.shape, 0.9, 1e-15);
  EXPECT_NEAR(g.scale, 5.0 / 3.0, 1e-15);
  const std::vector<double> bad{1.0, 0.0};
  EXPECT_THROW((void)ncar::weighted_chisq_cdf(1.0, bad), ncar::InvalidArgument);
  const std::vector<double> negative{-0.5};
  EXPECT_THROW((void)ncar::weighted_chisq_cdf(1.0, negative), ncar::InvalidArgument);
}

TEST(WeightedChiSquare, ClosedFormShapeAndScaleForLinearWeights) {
  for (std::size_t m = 1; m <= 50; ++m) {
    const double md = double(m);
    const auto g = ncar::weighted_chisq_gamma(ncar::linear_weights(m));
    EXPECT_NEAR(g.shape / (3.0 * md * (md + 1.0) / (8.0 * md + 4.0)), 1.0, 1e-12) << m;
    EXPECT_NEAR(g.scale / (2.0 * (2.0 * md + 1.0) / (3.0 * md)), 1.0, 1e-12) << m;
  }
}

TEST(ReferenceDistribution, DescribeAndValidate) {
  EXPECT_EQ(ncar::ReferenceDistribution::chi_square(3).describe(), "chisq(df=3)");
  EXPECT_EQ(ncar::ReferenceDistribution::gamma(0.9, 2).describe(), "gamma(shape=0.90000000000000002,scale=2)");
  EXPECT_THROW((void)ncar::ReferenceDistribution::chi_square(0.0), ncar::InvalidArgument);
  for (Statistic s : ncar::kAllStatistics) EXPECT_EQ(ncar::statistic_from_string(ncar::to_string(s)), s);
  EXPECT_FALSE(ncar::statistic_from_string("Q_xx").has_value());
}

TEST(Battery, RowsAndRowLevelErrors) {
  const auto z = ncar::stable_sample({1.5, 0.0, 1.0, 0.0}, 300, 8);
  const std::vector<std::size_t> lags{5};
  const auto rows = ncar::run_battery(z, lags);
  ASSERT_EQ(rows.size(), 8u);
  for (const auto& row : rows) {
    ASSERT_TRUE(row.report.has_value()) << row.error;
    EXPECT_GT(row.report->p_value, 0.0);
    EXPECT_LT(row.report->p_value, 1.0);
  }
  const std::vector<double> constant(300, 1.0);
  const auto bad = ncar::run_battery(constant, lags);
  std::size_t failed = 0;
  for (const auto& row : bad) {
    if (!row.report) {
      ++failed;
      EXPECT_NE(row.error.find("degenerate"), std::string::npos) << row.error;
    }
  }
  EXPECT_EQ(failed, 6u);  // everything built on the trimmed ACF
}

TEST(Battery, PValuesUniformUnderWhiteNoise) {
  const std::size_t reps = 1000;
  const std::vector<std::size_t> lags{10};
  std::vector<double> p_lb, p_mt, p_rk;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto z = ncar::stable_sample({1.8, 0.0, 1.0, 0.0}, 1000, ncar::derive_seed(4242, r));
    const auto rows = ncar::run_battery(z, lags);
    for (const auto& row : rows) {
      if (row.name == Statistic::Q_lb) p_lb.push_back(row.report->p_value);
      if (row.name == Statistic::Q_mt) p_mt.push_back(row.report->p_value);
      if (row.name == Statistic::Q_rk) p_rk.push_back(row.report->p_value);
    }
  }
  const std::vector<double> grid{0.0, 1.0};
  for (const auto* p : {&p_lb, &p_mt, &p_rk}) EXPECT_LT(oracle::ks_distance(*p, grid, grid), 0.06);
}

}  // namespace
