#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "ncar/error.hpp"
#include "ncar/stable.hpp"
#include "oracles.hpp"

namespace {

using ncar::StableParams;

// Fourier-inversion reference values (30-digit quadrature of exp(-|t|^1.5)).
constexpr double kPdfAlpha15At15 = 0.13613362807400778857;
constexpr double kLogPdfAlpha15At50 = -10.977639562711619534;

// Probability of [-hi, hi].
double mass(const StableParams& p, double hi) {
  auto f = [&](double x) { return ncar::stable_pdf(x, p); };
  // Panels widen geometrically away from the mode.
  std::vector<double> cuts{0.0};
  for (double w = 0.25; w < hi; w *= 1.35) cuts.push_back(w);
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 0, 1e-12);
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -cuts[i + 1], -cuts[i], 0, 1e-12);
  }
  return total;
}

TEST(StablePdf, GaussianAndCauchyClosedForms) {
  EXPECT_NEAR(ncar::stable_pdf(0.0, {2.0, 0.0, 1.0, 0.0}), 1.0 / (2.0 * std::sqrt(std::numbers::pi)), 1e-12);
  EXPECT_NEAR(ncar::stable_pdf(0.0, {1.0, 0.0, 1.0, 0.0}), 1.0 / std::numbers::pi, 1e-12);
  EXPECT_NEAR(ncar::stable_logpdf(0.0, {2.0, 0.0, 1.0, 0.0}), -1.2655121234846454, 1e-12);
  EXPECT_NEAR(ncar::stable_logpdf(0.0, {1.0, 0.0, 1.0, 0.0}), -std::log(std::numbers::pi), 1e-12);
  // Gaussian variance 2 gamma^2, location delta.
  const StableParams g{2.0, 0.7, 1.5, 0.3};
  const double var = 2.0 * 1.5 * 1.5;
  EXPECT_NEAR(ncar::stable_pdf(1.2, g), std::exp(-0.81 / (2 * var)) / std::sqrt(2 * std::numbers::pi * var), 1e-14);
}

TEST(StablePdf, MatchesFourierOracleValues) {
  EXPECT_NEAR(oracle::stable_pdf_fourier(1.5, 1.5, 0.0), kPdfAlpha15At15, 1e-10);
  EXPECT_NEAR(ncar::stable_pdf(1.5, {1.5, 0.0, 1.0, 0.0}), kPdfAlpha15At15, 1e-8);
  EXPECT_NEAR(ncar::stable_logpdf(50.0, {1.5, 0.0, 1.0, 0.0}), kLogPdfAlpha15At50, 1e-3);
}

TEST(StablePdf, AgreesWithFourierInversionOnGrid) {
  for (double alpha : {0.6, 0.8, 1.2, 1.5, 1.8, 1.95}) {
    for (double beta : {-1.0, 0.0, 0.5, 1.0}) {
      for (double x : {-4.0, -1.3, -0.2, 0.0, 0.7, 2.0, 5.0}) {
        const double ref = oracle::stable_pdf_fourier(x, alpha, beta);
        if (ref < 1e-6) continue;  // the oracle's absolute accuracy is ~1e-13
        EXPECT_NEAR(ncar::stable_pdf(x, {alpha, beta, 1.0, 0.0}) / ref, 1.0, 1e-7)
            << "alpha=" << alpha << " beta=" << beta << " x=" << x;
      }
    }
  }
}

TEST(StablePdf, LocationScaleFamily) {
  const StableParams p{1.3, -0.4, 2.5, -1.0};
  for (double x : {-7.0, -1.0, 0.4, 3.3}) {
    const double z = (x - p.delta) / p.gamma;
    EXPECT_NEAR(ncar::stable_pdf(x, p), ncar::stable_pdf(z, {1.3, -0.4, 1.0, 0.0}) / p.gamma, 1e-15);
  }
}

TEST(StablePdf, LogPdfIsLogOfPdf) {
  for (double alpha : {0.7, 1.0, 1.4, 1.9}) {
    for (double beta : {-0.8, 0.0, 0.6}) {
      for (double x : {-30.0, -3.0, -0.5, 0.0, 0.5, 3.0, 30.0}) {
        const StableParams p{alpha, beta, 1.0, 0.0};
        const double pdf = ncar::stable_pdf(x, p);
        if (pdf > 1e-300) EXPECT_NEAR(ncar::stable_logpdf(x, p), std::log(pdf), 1e-8 * std::abs(std::log(pdf)) + 1e-14);
      }
    }
  }
}

TEST(StablePdf, IntegratesToNearlyOneOnWideInterval) {
  for (double alpha : {0.8, 1.2, 1.5, 1.8}) {
    for (double beta : {0.0, 0.5}) {
      const double m = mass({alpha, beta, 1.0, 0.0}, 200.0);
      EXPECT_GE(m, 0.98) << "alpha=" << alpha << " beta=" << beta;
      EXPECT_LE(m, 1.0) << "alpha=" << alpha << " beta=" << beta;
    }
  }
}

TEST(StablePdf, SymmetricWhenBetaIsZero) {
  for (double alpha : {0.5, 0.9, 1.0, 1.1, 1.7, 2.0}) {
    for (double x : {0.1, 1.0, 4.0, 24.0, 26.0, 300.0}) {
      const StableParams p{alpha, 0.0, 1.0, 0.0};
      EXPECT_NEAR(ncar::stable_pdf(x, p), ncar::stable_pdf(-x, p), 1e-10);
    }
  }
}

TEST(StablePdf, ContinuousAcrossAlphaOne) {
  for (double beta : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0, 10.0}) {
      const double lo = ncar::stable_pdf(x, {0.999, beta, 1.0, 0.0});
      const double hi = ncar::stable_pdf(x, {1.001, beta, 1.0, 0.0});
      const double mid = ncar::stable_pdf(x, {1.0, beta, 1.0, 0.0});
      EXPECT_LT(std::abs(lo - hi), 1e-3) << "beta=" << beta << " x=" << x;
      EXPECT_LT(std::abs(mid - 0.5 * (lo + hi)), 1e-3) << "beta=" << beta << " x=" << x;
    }
  }
}

TEST(StableLogPdf, FollowsTailAsymptoteFarOut) {
  // log f ~ log(alpha C_alpha (1 + beta)) - (alpha + 1) log x with C_alpha = sin(pi alpha/2) Gamma(alpha)/pi.
  for (double alpha : {0.8, 1.5}) {
    const double beta = 0.3;
    const double c = std::sin(std::numbers::pi * alpha / 2.0) * std::tgamma(alpha) / std::numbers::pi;
    const double x = 1e8;
    const double expected = std::log(alpha * c * (1.0 + beta)) - (alpha + 1.0) * std::log(x);
    EXPECT_NEAR(ncar::stable_logpdf(x, {alpha, beta, 1.0, 0.0}), expected, 1e-4);
  }
  // Finite even where the density underflows.
  const double v = ncar::stable_logpdf(1e300, {1.5, 0.0, 1.0, 0.0});
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_LT(v, -1000.0);
}

TEST(StableLogPdf, LightSideOfTotallySkewedLawIsVerySmall) {
  EXPECT_LT(ncar::stable_logpdf(-50.0, {1.5, 1.0, 1.0, 0.0}), -1000.0);
}

TEST(StablePdf, RejectsInvalidInput) {
  EXPECT_THROW((void)ncar::stable_pdf(std::numeric_limits<double>::quiet_NaN(), {}), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::stable_pdf(std::numeric_limits<double>::infinity(), {}), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::stable_pdf(0.0, {2.1, 0.0, 1.0, 0.0}), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::stable_pdf(0.0, {1.5, 1.2, 1.0, 0.0}), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::stable_pdf(0.0, {1.5, 0.0, 0.0, 0.0}), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::stable_pdf(0.0, {0.0, 0.0, 1.0, 0.0}), ncar::InvalidArgument);
}

TEST(StableParameterization, S1RoundTrip) {
  for (double alpha : {0.7, 1.0, 1.6}) {
    const StableParams p = ncar::from_s1(alpha, 0.4, 2.0, 1.5);
    EXPECT_NEAR(ncar::s1_location(p), 1.5, 1e-12);
    EXPECT_EQ(p.gamma, 2.0);
  }
}

TEST(StableSample, GaussianLimitMoments) {
  const std::vector<double> x = ncar::stable_sample({2.0, 0.0, 1.0, 0.0}, 100000, 11);
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  EXPECT_LT(std::abs(mean), 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(ss / (n - 1.0) / 2.0, 1.0, 0.05);
}

TEST(StableSample, DeterministicGivenSeed) {
  const StableParams p{1.2, 0.5, 1.0, 0.0};
  EXPECT_EQ(ncar::stable_sample(p, 1000, 5), ncar::stable_sample(p, 1000, 5));
  EXPECT_NE(ncar::stable_sample(p, 1000, 5), ncar::stable_sample(p, 1000, 6));
}

TEST(StableSample, AgreesWithIntegratedDensity) {
  const StableParams p{1.5, 0.0, 1.0, 0.0};
  std::vector<double> grid;
  for (double x = -60.0; x <= 60.0 + 1e-9; x += 0.05) grid.push_back(x);
  // CDF(-60) from the symmetric tail asymptote; the remainder by quadrature of the density.
  const double c = std::sin(std::numbers::pi * 0.75) * std::tgamma(1.5) / std::numbers::pi;
  std::vector<double> cdf{c * std::pow(60.0, -1.5)};
  auto f = [&](double x) { return ncar::stable_pdf(x, p); };
  for (std::size_t i = 1; i < grid.size(); ++i) {
    cdf.push_back(cdf.back() + boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, grid[i - 1], grid[i]));
  }
  EXPECT_NEAR(cdf.back(), 1.0 - cdf.front(), 2e-4);
  EXPECT_LT(oracle::ks_distance(ncar::stable_sample(p, 100000, 2024), grid, cdf), 0.01);
}

TEST(StableSample, RngAdvancesTwoUniformsPerDraw) {
  ncar::Rng a(3);
  ncar::Rng b(3);
  (void)ncar::stable_draw({1.1, 0.2, 1.0, 0.0}, a);
  (void)b.uniform();
  (void)b.uniform();
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

}  // namespace
