#include "ncar/special.hpp"

#include <cmath>
#include <limits>

#include "ncar/error.hpp"

namespace ncar::special {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// log(x^a e^-x / Gamma(a)), the common prefactor of both expansions.
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// P(a, x) by the power series; used for x < a + 1.
double series_p(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * sum;
}

// Q(a, x) by the Legendre continued fraction (modified Lentz); used for x >= a + 1.
double continued_fraction_q(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * h;
}

void check_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("incomplete gamma: shape must be positive");
  if (std::isnan(x)) throw InvalidArgument("incomplete gamma: argument is NaN");
}

}  // namespace

double gamma_p(double a, double x) {
  check_args(a, x);
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return series_p(a, x);
  return 1.0 - continued_fraction_q(a, x);
}

double gamma_q(double a, double x) {
  check_args(a, x);
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - series_p(a, x);
  return continued_fraction_q(a, x);
}

double gamma_cdf(double x, double shape, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("gamma_cdf: scale must be positive");
  return gamma_p(shape, x / scale);
}

double gamma_sf(double x, double shape, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("gamma_sf: scale must be positive");
  return gamma_q(shape, x / scale);
}

double chisq_cdf(double x, double df) { return gamma_cdf(x, 0.5 * df, 2.0); }
double chisq_sf(double x, double df) { return gamma_sf(x, 0.5 * df, 2.0); }

}  // namespace ncar::special
