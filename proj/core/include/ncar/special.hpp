#pragma once

namespace ncar::special {

/// Regularized lower incomplete gamma P(a, x). Requires a > 0, x >= 0.
[[nodiscard]] double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed without cancellation.
[[nodiscard]] double gamma_q(double a, double x);

[[nodiscard]] double gamma_cdf(double x, double shape, double scale);
[[nodiscard]] double gamma_sf(double x, double shape, double scale);

/// Chi-square CDF; `df` may be fractional.
[[nodiscard]] double chisq_cdf(double x, double df);
[[nodiscard]] double chisq_sf(double x, double df);

}  // namespace ncar::special
