#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ncar/rng.hpp"

namespace ncar {

/**
 * @brief Four-parameter alpha-stable law in the S0 ("parameterization zero") form.
 *
 * S0 is a location-scale family that is continuous in all four parameters, including
 * across alpha = 1. For alpha = 2 the law is Gaussian with variance 2 * gamma^2.
 */
struct StableParams {
  double alpha = 2.0;  ///< tail exponent, (0, 2]
  double beta = 0.0;   ///< skewness, [-1, 1]
  double gamma = 1.0;  ///< scale, > 0
  double delta = 0.0;  ///< location

  /// Throws InvalidArgument unless every field is finite and in range.
  void validate() const;

  [[nodiscard]] bool operator==(const StableParams&) const = default;
};

/// S0 parameters of a law given in the classical S1 convention (location `delta1`).
[[nodiscard]] StableParams from_s1(double alpha, double beta, double gamma, double delta1);

/// The S1 location of `params`; the other three parameters coincide between conventions.
[[nodiscard]] double s1_location(const StableParams& params);

/**
 * @brief Density evaluator with the per-(alpha, beta) constants precomputed.
 *
 * Evaluating many points under one parameter set (a likelihood) should go through one
 * instance rather than the free functions.
 */
class StableDensity {
 public:
  explicit StableDensity(const StableParams& params);

  [[nodiscard]] double logpdf(double x) const;
  [[nodiscard]] double pdf(double x) const;

  [[nodiscard]] const StableParams& params() const noexcept { return params_; }

 private:
  [[nodiscard]] double log_standard(double z) const;

  StableParams params_;
  double log_gamma_;
};

/// Standardized distance |x - delta| / gamma beyond which the tail series may replace quadrature.
inline constexpr double kTailCrossover = 25.0;

[[nodiscard]] double stable_pdf(double x, const StableParams& params);
[[nodiscard]] double stable_logpdf(double x, const StableParams& params);

/// `n` i.i.d. draws by the Chambers-Mallows-Stuck transformation, mapped to S0.
[[nodiscard]] std::vector<double> stable_sample(const StableParams& params, std::size_t n, Rng& rng);
[[nodiscard]] std::vector<double> stable_sample(const StableParams& params, std::size_t n,
                                                std::uint64_t seed);

/// One CMS draw, advancing `rng` by exactly two uniforms.
[[nodiscard]] double stable_draw(const StableParams& params, Rng& rng);

}  // namespace ncar
