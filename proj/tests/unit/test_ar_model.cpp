#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "ncar/ar_model.hpp"
#include "ncar/error.hpp"

namespace {

using ncar::ArModel;
using cplx = std::complex<double>;

std::vector<double> sorted_real_parts(const std::vector<cplx>& roots) {
  std::vector<double> re;
  for (const cplx& z : roots) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  return re;
}

// Entry t of the convolution of phi(z) with the Laurent series, for t in [-K, K + p].
double convolution_entry(const ArModel& model, const ncar::LaurentCoeffs& lc, long t) {
  const std::vector<double> poly = model.polynomial();
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) acc += poly[i] * lc.at(t - static_cast<long>(i));
  return acc;
}

const std::vector<std::vector<double>> kModels = {
    {0.5}, {2.0}, {2.8, -1.6}, {-1.2, 1.6}, {0.0, 0.5}, {1.3, -0.4}, {0.3, 0.2, -0.5, 0.1}, {-0.9, 3.1, 0.4}};

TEST(FindRoots, LinearAndQuadraticExamples) {
  auto r = ncar::find_roots(ArModel({0.5}));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0].real(), 2.0, 1e-14);
  EXPECT_EQ(r[0].imag(), 0.0);

  EXPECT_NEAR(ncar::find_roots(ArModel({2.0}))[0].real(), 0.5, 1e-14);

  const auto re = sorted_real_parts(ncar::find_roots(ArModel({2.8, -1.6})));
  EXPECT_NEAR(re[0], 0.5, 1e-12);
  EXPECT_NEAR(re[1], 1.25, 1e-12);

  const auto re2 = sorted_real_parts(ncar::find_roots(ArModel({-1.2, 1.6})));
  EXPECT_NEAR(re2[0], -0.5, 1e-12);
  EXPECT_NEAR(re2[1], 1.25, 1e-12);
}

TEST(FindRoots, ResidualsSmallAndConjugatePairs) {
  for (const auto& phi : kModels) {
    const ArModel model(phi);
    const auto roots = ncar::find_roots(model);
    ASSERT_EQ(roots.size(), phi.size());
    const double scale = 1.0 + std::accumulate(phi.begin(), phi.end(), 0.0, [](double a, double b) { return a + std::abs(b); });
    for (const cplx& z : roots) {
      EXPECT_LT(std::abs(model.evaluate(z)), 1e-9 * scale);
      if (z.imag() != 0.0) {
        const bool paired = std::any_of(roots.begin(), roots.end(), [&](const cplx& w) { return w == std::conj(z); });
        EXPECT_TRUE(paired);
      }
    }
  }
}

TEST(FindRoots, HighOrderRandomPolynomialRecoversPlantedRoots) {
  // Expand from known roots, then recover them.
  const std::vector<cplx> planted = {{2.0, 0.0}, {-0.4, 0.0}, {0.3, 0.6}, {0.3, -0.6}, {1.5, 1.1}, {1.5, -1.1},
                                     {-3.0, 0.0}, {0.9, 0.0},  {-1.2, 0.7}, {-1.2, -0.7}};
  std::vector<cplx> poly{1.0};
  for (const cplx& z : planted) {
    std::vector<cplx> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= poly[i] / z;
    }
    poly = next;
  }
  std::vector<double> phi;
  for (std::size_t i = 1; i < poly.size(); ++i) phi.push_back(-poly[i].real());
  const auto roots = ncar::find_roots(ArModel(phi));
  for (const cplx& z : planted) {
    double best = 1e9;
    for (const cplx& w : roots) best = std::min(best, std::abs(w - z));
    EXPECT_LT(best, 1e-9) << z;
  }
}

TEST(FindRoots, UnitCircleRootIsRejected) {
  EXPECT_THROW((void)ncar::find_roots(ArModel({1.0})), ncar::UnitCircleRoot);
  EXPECT_THROW((void)ncar::find_roots(ArModel({-1.0})), ncar::UnitCircleRoot);
  EXPECT_THROW((void)ncar::find_roots(ArModel({0.0, -1.0})), ncar::UnitCircleRoot);  // roots +-i
  EXPECT_NO_THROW((void)ncar::find_roots(ArModel({1.0 / 1.00001})));
}

TEST(ArModelType, RejectsNonFiniteCoefficients) {
  EXPECT_THROW(ArModel({std::nan("")}), ncar::InvalidArgument);
  EXPECT_THROW(ArModel({1.0, INFINITY}), ncar::InvalidArgument);
}

TEST(Factorize, SpecExamples) {
  const auto f1 = ncar::factorize(ArModel({2.8, -1.6}));
  ASSERT_EQ(f1.r(), 1u);
  ASSERT_EQ(f1.s(), 1u);
  EXPECT_NEAR(f1.causal_coeffs[0], 0.8, 1e-12);
  EXPECT_NEAR(f1.noncausal_coeffs[0], 2.0, 1e-12);

  const auto f2 = ncar::factorize(ArModel({0.5}));
  EXPECT_EQ(f2.r(), 1u);
  EXPECT_EQ(f2.s(), 0u);
  EXPECT_NEAR(f2.causal_coeffs[0], 0.5, 1e-15);

  const auto f3 = ncar::factorize(ArModel({-1.2, 1.6}));
  ASSERT_EQ(f3.r(), 1u);
  ASSERT_EQ(f3.s(), 1u);
  EXPECT_NEAR(f3.causal_coeffs[0], 0.8, 1e-12);
  EXPECT_NEAR(f3.noncausal_coeffs[0], -2.0, 1e-12);
}

TEST(Factorize, ExpandRoundTrip) {
  for (const auto& phi : kModels) {
    const auto f = ncar::factorize(ArModel(phi));
    EXPECT_EQ(f.r() + f.s(), phi.size());
    const std::vector<double> back = f.expand();
    ASSERT_EQ(back.size(), phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_NEAR(back[i], phi[i], 1e-10);
    for (const cplx& z : ncar::find_roots(ArModel(f.causal_coeffs))) EXPECT_GT(std::abs(z), 1.0);
    if (f.s() > 0) {
      for (const cplx& z : ncar::find_roots(ArModel(f.noncausal_coeffs))) EXPECT_LT(std::abs(z), 1.0);
    }
  }
}

TEST(Factorize, CausalRepresentationFlipsInsideRoots) {
  const ArModel causal = ncar::causal_representation(ArModel({2.8, -1.6}));
  ASSERT_EQ(causal.order(), 2u);
  EXPECT_NEAR(causal.coeffs()[0], 1.3, 1e-12);
  EXPECT_NEAR(causal.coeffs()[1], -0.4, 1e-12);
}

TEST(Laurent, GeometricExamples) {
  const auto a = ncar::laurent_coeffs(ArModel({0.5}), 1e-12);
  for (std::size_t j = 0; j < a.psi_plus.size(); ++j) EXPECT_NEAR(a.psi_plus[j], std::pow(0.5, j), 1e-15);
  for (double v : a.psi_minus) EXPECT_EQ(v, 0.0);

  const auto b = ncar::laurent_coeffs(ArModel({2.0}), 1e-12);
  for (double v : b.psi_plus) EXPECT_EQ(v, 0.0);
  for (std::size_t k = 1; k <= b.truncation(); ++k) EXPECT_NEAR(b.psi_minus[k - 1], -std::pow(2.0, -double(k)), 1e-15);
}

TEST(Laurent, ConvolutionOracleForTableOneModel) {
  // psi_0 = sum_k 0.8^k (-2^-k) = -2/3 from the product of the two geometric series.
  const auto lc = ncar::laurent_coeffs(ArModel({2.8, -1.6}), 1e-12);
  double psi0 = 0.0;
  for (int k = 1; k < 200; ++k) psi0 -= std::pow(0.4, k);
  EXPECT_NEAR(lc.at(0), psi0, 1e-12);
  EXPECT_NEAR(lc.at(0), -2.0 / 3.0, 1e-12);
  // psi_j = 0.8^j psi_0 for j >= 0; psi_-j = -sum_{k>=j} 2^-k 0.8^(k-j) = -(5/3) 2^-j for j >= 1.
  EXPECT_NEAR(lc.at(5), std::pow(0.8, 5) * psi0, 1e-12);
  EXPECT_NEAR(lc.at(-3), -5.0 / 3.0 * std::pow(0.5, 3), 1e-12);
  EXPECT_NEAR(lc.at(-1), -5.0 / 6.0, 1e-12);
}

TEST(Laurent, ConvolutionIdentityTailAndDecay) {
  for (const auto& phi : kModels) {
    const ArModel model(phi);
    const auto lc = ncar::laurent_coeffs(model, 1e-12);
    const long k = static_cast<long>(lc.truncation());
    ASSERT_GT(k, 0);
    for (long t = -k; t <= k; ++t) EXPECT_NEAR(convolution_entry(model, lc, t), t == 0 ? 1.0 : 0.0, 1e-8) << t;
    EXPECT_LT(std::abs(lc.psi_plus.back()) + std::abs(lc.psi_minus.back()), 1e-12);

    // Average one-step decay ratio over ten indices beyond K/2 is below one.
    const long start = k / 2;
    const double a = std::abs(lc.at(start)) + std::abs(lc.at(-start));
    const double b = std::abs(lc.at(start + 10)) + std::abs(lc.at(-start - 10));
    if (a > 0.0) EXPECT_LT(std::pow(b / a, 0.1), 1.0);
  }
}

TEST(Laurent, NearUnitRootExceedsCap) {
  EXPECT_THROW((void)ncar::laurent_coeffs(ArModel({1.0 / 1.000002}), 1e-12), ncar::NonConvergent);
}

TEST(Laurent, RejectsBadTolerance) {
  EXPECT_THROW((void)ncar::laurent_coeffs(ArModel({0.5}), 0.0), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::laurent_coeffs(ArModel({0.5}), 1.0), ncar::InvalidArgument);
}

TEST(Simulate, FilterRecoversInnovations) {
  const ncar::StableParams noise{1.5, 0.0, 1.0, 0.0};
  for (const auto& phi : kModels) {
    const ArModel model(phi);
    ncar::Rng rng(99);
    const auto path = ncar::simulate_path(model, noise, 400, rng);
    ASSERT_EQ(path.values.size(), 400 + phi.size());
    const std::size_t p = phi.size();
    double worst = 0.0;
    for (std::size_t t = p; t < path.values.size(); ++t) {
      double z = path.values[t];
      for (std::size_t i = 0; i < p; ++i) z -= phi[i] * path.values[t - 1 - i];
      worst = std::max(worst, std::abs(z - path.innovations[t]));
    }
    EXPECT_LT(worst, 1e-6);
  }
}

TEST(Simulate, GaussianCausalArOneAutocorrelation) {
  const auto y = ncar::simulate(ArModel({0.5}), {2.0, 0.0, 1.0, 0.0}, 100000, 17);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    den += (y[t] - mean) * (y[t] - mean);
    if (t > 0) num += (y[t] - mean) * (y[t - 1] - mean);
  }
  EXPECT_NEAR(num / den, 0.5, 0.02);
}

TEST(Simulate, DeterministicAndLengthContract) {
  const ArModel model({2.8, -1.6});
  const ncar::StableParams noise{1.8, 0.0, 1.0, 0.0};
  const auto a = ncar::simulate(model, noise, 100, 4);
  EXPECT_EQ(a.size(), 102u);
  EXPECT_EQ(a, ncar::simulate(model, noise, 100, 4));
  EXPECT_NE(a, ncar::simulate(model, noise, 100, 5));
}

TEST(Simulate, PreconditionErrors) {
  const ArModel model({2.8, -1.6});
  const auto k = ncar::laurent_coeffs(model).truncation();
  EXPECT_THROW((void)ncar::simulate(model, {}, 100, k - 1, 1), ncar::InvalidArgument);
  EXPECT_NO_THROW((void)ncar::simulate(model, {}, 100, k, 1));
  EXPECT_THROW((void)ncar::simulate(model, {}, 2, 1), ncar::InvalidArgument);
  EXPECT_THROW((void)ncar::simulate(ArModel({1.0}), {}, 100, 1), ncar::UnitCircleRoot);
}

TEST(Simulate, WhiteNoiseModelReturnsInnovations) {
  const ncar::StableParams noise{1.2, 0.3, 2.0, 1.0};
  ncar::Rng rng(8);
  const auto path = ncar::simulate_path(ArModel(std::vector<double>{}), noise, 50, rng);
  EXPECT_EQ(path.values, path.innovations);
}

}  // namespace
