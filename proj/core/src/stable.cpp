#include "ncar/stable.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ncar/error.hpp"
#include "ncar/quadrature.hpp"

namespace ncar {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kPeakBisections = 300;

// Relative tolerance on the normalized integral, which never exceeds pi / e.
const quad::Options kQuadOptions{1e-280, 1e-10, 400};

// Rounding can push a factor that vanishes at an end of the domain slightly negative.
inline double safe_log(double v) { return std::log(std::max(v, 0.0)); }

// Integrand g exp(-g) of the single-integral representation, given log g. It never exceeds
// 1/e, so a 0/0 that rounding produces within an ulp of an endpoint can be dropped.
inline double peak_integrand(double log_g) {
  if (!(log_g <= 40.0)) return 0.0;
  return std::exp(log_g - std::exp(log_g));
}

enum class SingularEnd { kLower, kUpper };

// log g is monotone; bisect for its zero crossing, stopping once log g is small enough that
// the point lies well inside the peak of g exp(-g). While the crossing keeps hugging one end
// the steps become geometric, so a peak many orders of magnitude from the far end is still
// reached in a bounded number of steps.
template <class LogG>
double locate_peak(const LogG& log_g, double lo, double hi, bool increasing) {
  double a = lo;
  double b = hi;
  double m = 0.5 * (a + b);
  for (int i = 0; i < kPeakBisections; ++i) {
    if (i >= 8 && a == lo) {
      m = lo + (b - lo) * 1e-4;
    } else if (i >= 8 && b == hi) {
      m = hi - (hi - a) * 1e-4;
    } else {
      m = 0.5 * (a + b);
    }
    if (!(m > a && m < b)) break;
    const double v = log_g(m);
    if (std::isnan(v) || std::abs(v) < 0.05) break;
    if ((v < 0.0) == increasing) {
      a = m;
    } else {
      b = m;
    }
  }
  return m;
}

// |d log g / d theta| at the peak, from a difference quotient over a step that shrinks
// until log g changes by O(1).
template <class LogG>
double peak_slope(const LogG& log_g, double peak, double lo, double hi) {
  double h = 1e-3 * (hi - lo);
  for (int i = 0; i < 40; ++i) {
    h = std::min({h, 0.5 * (peak - lo), 0.5 * (hi - peak)});
    if (!(h > 0.0)) return 0.0;
    const double dv = std::abs(log_g(peak + h) - log_g(peak - h));
    if (!std::isfinite(dv)) {
      h *= 0.125;
      continue;
    }
    if (dv <= 2.0) return dv / (2.0 * h);
    h *= 0.125;
  }
  return 0.0;
}

// The integrand has width ~1/|d log g / d theta| around its peak, which can be far narrower
// than the domain (alpha near 1, far tails). Breakpoints at geometrically growing distances
// from the peak keep every panel's width comparable to the local scale of the integrand.
// At the end where g vanishes the integrand behaves like a fractional power of the distance
// to the end; the panel touching it is integrated in v with y = end -/+ w v^4, which turns
// that power into a smooth one.
//
// log_g(u, e) receives both the offset u from the lower end and e = width - u from the upper
// end. The integration runs in whichever offset is small near the peak, so a peak squeezed
// against either end keeps full relative resolution.
template <class LogG2>
double integrate_peaked(const LogG2& log_g2, double width, bool increasing, SingularEnd singular) {
  const double mid = 0.5 * width;
  const double v_mid = log_g2(mid, width - mid);
  const bool from_upper = increasing ? v_mid < 0.0 : v_mid > 0.0;
  const auto log_g = [&](double y) { return from_upper ? log_g2(width - y, y) : log_g2(y, width - y); };
  if (from_upper) {
    increasing = !increasing;
    singular = singular == SingularEnd::kLower ? SingularEnd::kUpper : SingularEnd::kLower;
  }

  const double lo = 0.0;
  const double hi = width;
  const double peak = locate_peak(log_g, lo, hi, increasing);
  const double slope = peak_slope(log_g, peak, lo, hi);
  std::vector<double> breaks{lo};
  if (std::isfinite(slope) && slope * (hi - lo) > 64.0) {
    for (double w = 1.0 / slope; peak - w > lo; w *= 4.0) breaks.push_back(peak - w);
    std::reverse(breaks.begin() + 1, breaks.end());
    breaks.push_back(peak);
    for (double w = 1.0 / slope; peak + w < hi; w *= 4.0) breaks.push_back(peak + w);
  } else {
    breaks.push_back(peak);
  }
  breaks.push_back(hi);

  const double edge = singular == SingularEnd::kUpper ? breaks[breaks.size() - 2] : breaks[1];
  const auto f = [&](double t) {
    if (singular == SingularEnd::kUpper && t > edge) {
      const double w = hi - edge;
      const double v = (hi - t) / w;
      const double v3 = v * v * v;
      return 4.0 * v3 * peak_integrand(log_g(hi - w * v3 * v));
    }
    if (singular == SingularEnd::kLower && t < edge) {
      const double w = edge - lo;
      const double v = (t - lo) / w;
      const double v3 = v * v * v;
      return 4.0 * v3 * peak_integrand(log_g(lo + w * v3 * v));
    }
    return peak_integrand(log_g(t));
  };
  const quad::Result r = quad::integrate(f, std::span<const double>(breaks), kQuadOptions);
  if (!r.converged) {
    throw QuadratureError("stable density quadrature did not converge (error estimate " +
                              std::to_string(r.error) + ")",
                          r.error);
  }
  return r.value;
}

// S0 standard density for alpha != 1 at S1 offset xs = z - zeta > 0, with beta already
// reflected so that theta0 = atan(beta tan(pi alpha / 2)) / alpha.
//
// With u = theta + theta0 on (0, width), width = pi/2 + theta0, d = pi - width and
// c = pi - alpha width, the factors of g that can vanish at an end are
//   cos(theta)                  = sin(u + d)                 = sin(e),
//   sin(alpha u)                = sin(alpha u)               = sin(c + alpha e),
//   cos(theta0 + (alpha - 1) u) = sin(d - (alpha - 1) u)     = sin(c + (alpha - 1) e),
// evaluated in the form whose argument is accurate near that end. d, width and c come from
// cancellation-free arctangent identities, since they are exactly zero for |beta| = 1.
double log_density_general(double xs, double alpha, double beta) {
  const double x = std::tan(kHalfPi * alpha);
  const double t = beta * x;
  const double abs_t = std::abs(t);
  const double one_minus_abs_beta = 1.0 - std::abs(beta);
  // alpha (pi/2 - atan(|t|) / alpha).
  const double alpha_d = alpha < 1.0 ? std::atan(x * one_minus_abs_beta / (1.0 + abs_t * x))
                                     : kHalfPi * (alpha - 1.0) + std::atan2(1.0, abs_t);
  const double big_d = alpha_d / alpha;
  const double d = t >= 0.0 ? big_d : kPi - big_d;
  const double width = t >= 0.0 ? kPi - big_d : big_d;
  if (!(width > 0.0)) return kNegInf;  // outside the support of a totally skewed law
  // c = pi (2 - alpha) / 2 - atan(t).
  const double c = (alpha > 1.0 && t > 0.0)
                       ? std::atan(-x * one_minus_abs_beta / (1.0 - x * t))
                       : kHalfPi * (2.0 - alpha) - std::atan(t);

  const double am1 = alpha - 1.0;
  const double s = alpha / am1;
  const double base = s * std::log(xs) - 0.5 * std::log1p(t * t) / am1;
  const auto log_g = [&](double u, double e) {
    double cos_theta = 0.0;
    double sin_au = 0.0;
    double cos_shift = 0.0;
    if (u <= e) {
      cos_theta = std::sin(u + d);
      sin_au = std::sin(alpha * u);
      cos_shift = std::sin(d - am1 * u);
    } else {
      cos_theta = std::sin(e);
      sin_au = std::sin(c + alpha * e);
      cos_shift = std::sin(c + am1 * e);
    }
    return base + safe_log(cos_theta) / am1 - s * safe_log(sin_au) + safe_log(cos_shift);
  };
  const double integral =
      integrate_peaked(log_g, width, alpha < 1.0, alpha < 1.0 ? SingularEnd::kLower : SingularEnd::kUpper);
  if (!(integral > 0.0)) return kNegInf;
  return std::log(alpha) - std::log(kPi) - std::log(std::abs(am1)) - std::log(xs) + std::log(integral);
}

// alpha = 1 with beta > 0, at S0 (= S1) standardized point x, in u = theta + pi/2 on (0, pi).
double log_density_alpha_one(double x, double beta) {
  const double shift = -kPi * x / (2.0 * beta) + std::log(2.0 / kPi);
  const double h_lower = kHalfPi * (1.0 - beta);
  const double h_upper = kHalfPi * (1.0 + beta);
  const auto log_g = [&](double u, double e) {
    // h = pi/2 + beta theta; cos(theta) = sin(u) = sin(e); sin(theta) = cos(e) = -cos(u).
    const bool lower = u <= e;
    const double h = lower ? h_lower + beta * u : h_upper - beta * e;
    const double cos_theta = lower ? std::sin(u) : std::sin(e);
    const double sin_theta = lower ? -std::cos(u) : std::cos(e);
    return shift + safe_log(h) - std::log(cos_theta) + h * sin_theta / (cos_theta * beta);
  };
  const double integral = integrate_peaked(log_g, kPi, true, SingularEnd::kLower);
  if (!(integral > 0.0)) return kNegInf;
  return -std::log(2.0 * beta) + std::log(integral);
}

// Density at the mode-adjacent point z = zeta, where the integral form is singular.
double log_density_at_zeta(double alpha, double theta0, double zeta) {
  return std::lgamma(1.0 + 1.0 / alpha) + std::log(std::cos(theta0)) - std::log(kPi) -
         std::log1p(zeta * zeta) / (2.0 * alpha);
}

// Convergent (alpha < 1) or asymptotic (alpha > 1) power series in xs^-alpha, summed with
// the common factor r = (1 + zeta^2)^(1/2) xs^-alpha pulled out so huge xs cannot underflow.
std::optional<double> log_density_tail_series(double xs, double alpha, double theta0, double zeta) {
  const double log_r = 0.5 * std::log1p(zeta * zeta) - alpha * std::log(xs);
  if (!(log_r < std::log(0.1))) return std::nullopt;
  const double c = kHalfPi * alpha + alpha * theta0;
  // On the light side of a totally skewed law the leading coefficient vanishes.
  if (!(std::sin(c) > 1e-6)) return std::nullopt;
  double sum = 0.0;
  double first = 0.0;
  double prev_bound = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 200; ++k) {
    const double bound = std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(k + 1.0) + (k - 1) * log_r);
    if (k >= 3 && bound > prev_bound) break;  // asymptotic series has started to diverge
    const double term = ((k % 2 == 1) ? 1.0 : -1.0) * bound * std::sin(k * c);
    if (k == 1) first = term;
    sum += term;
    if (bound < 1e-17 * std::abs(sum)) break;
    prev_bound = bound;
  }
  if (!(first > 0.0) || std::abs(sum - first) > 0.1 * first) return std::nullopt;
  return std::log(sum) + log_r - std::log(kPi) - std::log(xs);
}

}  // namespace

void StableParams::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma) || !std::isfinite(delta)) {
    throw InvalidArgument("stable parameters must be finite");
  }
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("stable alpha must lie in (0, 2]");
  if (!(beta >= -1.0 && beta <= 1.0)) throw InvalidArgument("stable beta must lie in [-1, 1]");
  if (!(gamma > 0.0)) throw InvalidArgument("stable gamma must be positive");
}

StableParams from_s1(double alpha, double beta, double gamma, double delta1) {
  StableParams p{alpha, beta, gamma, 0.0};
  if (alpha == 1.0) {
    p.delta = delta1 + beta * (2.0 / kPi) * gamma * std::log(gamma);
  } else {
    p.delta = delta1 + beta * gamma * std::tan(kHalfPi * alpha);
  }
  p.validate();
  return p;
}

double s1_location(const StableParams& p) {
  p.validate();
  if (p.alpha == 1.0) return p.delta - p.beta * (2.0 / kPi) * p.gamma * std::log(p.gamma);
  return p.delta - p.beta * p.gamma * std::tan(kHalfPi * p.alpha);
}

StableDensity::StableDensity(const StableParams& params) : params_(params) {
  params_.validate();
  log_gamma_ = std::log(params_.gamma);
}

double StableDensity::log_standard(double z) const {
  const double alpha = params_.alpha;
  double beta = params_.beta;
  if (alpha == 2.0) return -0.25 * z * z - std::log(2.0 * std::sqrt(kPi));
  if (alpha == 1.0) {
    if (beta == 0.0) return -std::log(kPi) - std::log1p(z * z);
    double x = z;
    if (beta < 0.0) {
      beta = -beta;
      x = -x;
    }
    return log_density_alpha_one(x, beta);
  }
  const double t = beta * std::tan(kHalfPi * alpha);
  double zeta = -t;
  double theta0 = std::atan(t) / alpha;
  double xs = z - zeta;
  const bool reflected = xs < 0.0;
  if (reflected) {  // f(x; alpha, beta) = f(-x; alpha, -beta)
    xs = -xs;
    zeta = -zeta;
    theta0 = -theta0;
  }
  if (xs <= 1e-12 * std::max(1.0, std::abs(zeta))) return log_density_at_zeta(alpha, theta0, zeta);
  if (std::abs(z) > kTailCrossover) {
    if (auto v = log_density_tail_series(xs, alpha, theta0, zeta)) return *v;
  }
  return log_density_general(xs, alpha, reflected ? -beta : beta);
}

double StableDensity::logpdf(double x) const {
  if (!std::isfinite(x)) throw InvalidArgument("stable density evaluated at a non-finite point");
  return log_standard((x - params_.delta) / params_.gamma) - log_gamma_;
}

double StableDensity::pdf(double x) const { return std::exp(logpdf(x)); }

double stable_pdf(double x, const StableParams& params) { return StableDensity(params).pdf(x); }

double stable_logpdf(double x, const StableParams& params) { return StableDensity(params).logpdf(x); }

double stable_draw(const StableParams& p, Rng& rng) {
  const double v = kPi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  double x = 0.0;
  if (p.alpha == 1.0) {
    const double h = kHalfPi + p.beta * v;
    x = (h * std::tan(v) - p.beta * std::log(kHalfPi * w * std::cos(v) / h)) / kHalfPi;
  } else {
    const double t = p.beta * std::tan(kHalfPi * p.alpha);
    const double b = std::atan(t) / p.alpha;
    const double s = std::pow(1.0 + t * t, 0.5 / p.alpha);
    const double av = p.alpha * (v + b);
    x = s * std::sin(av) / std::pow(std::cos(v), 1.0 / p.alpha) *
            std::pow(std::cos(v - av) / w, (1.0 - p.alpha) / p.alpha) -
        t;
  }
  return p.gamma * x + p.delta;
}

std::vector<double> stable_sample(const StableParams& params, std::size_t n, Rng& rng) {
  params.validate();
  if (n == 0) throw InvalidArgument("stable_sample: n must be at least 1");
  std::vector<double> out(n);
  for (auto& x : out) x = stable_draw(params, rng);
  return out;
}

std::vector<double> stable_sample(const StableParams& params, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return stable_sample(params, n, rng);
}

}  // namespace ncar
