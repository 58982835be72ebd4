#include "ncar/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "ncar/error.hpp"
#include "ncar/nelder_mead.hpp"
#include "parallel.hpp"

namespace ncar {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kRootDrawAttempts = 1000;
constexpr std::size_t kPolishRestarts = 1;

// log of the smallest positive subnormal double.
const double kLogFloor = std::log(std::numeric_limits<double>::denorm_min());

// Fold x into [lo, hi] by mirror reflection at the ends.
double reflect(double x, double lo, double hi) {
  const double width = hi - lo;
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  if (y > width) y = 2.0 * width - y;
  return lo + y;
}

struct Point {
  ArModel model;
  StableParams noise;
};

Point unpack(std::span<const double> x, std::size_t p) {
  Point out{ArModel(std::vector<double>(x.begin(), x.begin() + static_cast<long>(p))), {}};
  out.noise.alpha = reflect(x[p], 0.5, 2.0);
  out.noise.beta = reflect(x[p + 1], -1.0, 1.0);
  out.noise.gamma = std::exp(x[p + 2]);
  out.noise.delta = x[p + 3];
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Draw a real root or a conjugate pair with log-uniform modulus outside the excluded band.
std::vector<double> draw_coefficients(std::size_t p, const StartBox& box, Rng& rng) {
  const double log_lo = std::log(box.root_modulus_min);
  const double log_hi = std::log(box.root_modulus_max);
  auto modulus = [&] {
    for (;;) {
      const double m = std::exp(rng.uniform(log_lo, log_hi));
      if (m <= box.excluded_lower || m >= box.excluded_upper) return m;
    }
  };
  std::vector<std::complex<double>> roots;
  while (roots.size() < p) {
    if (p - roots.size() >= 2 && rng.uniform() < 0.5) {
      const auto z = std::polar(modulus(), rng.uniform(0.0, std::numbers::pi));
      roots.push_back(z);
      roots.push_back(std::conj(z));
    } else {
      roots.emplace_back(rng.uniform() < 0.5 ? -modulus() : modulus(), 0.0);
    }
  }
  std::vector<std::complex<double>> poly{1.0};
  for (const auto& root : roots) {
    const auto c = -1.0 / root;
    poly.push_back(0.0);
    for (std::size_t i = poly.size() - 1; i > 0; --i) poly[i] += c * poly[i - 1];
  }
  std::vector<double> coeffs(p);
  for (std::size_t i = 0; i < p; ++i) coeffs[i] = -poly[i + 1].real();
  return coeffs;
}

}  // namespace

void FitConfig::validate() const {
  if (n_starts == 0) throw InvalidArgument("FitConfig: n_starts must be positive");
  if (n_refine == 0 || n_refine > n_starts) throw InvalidArgument("FitConfig: n_refine must lie in [1, n_starts]");
  if (!(simplex_tol > 0.0)) throw InvalidArgument("FitConfig: simplex_tol must be positive");
  if (max_iter == 0) throw InvalidArgument("FitConfig: max_iter must be positive");
  if (!(box.root_modulus_min > 0.0 && box.root_modulus_min < box.root_modulus_max)) {
    throw InvalidArgument("FitConfig: invalid root modulus range");
  }
  if (!(box.excluded_lower <= 1.0 && box.excluded_upper >= 1.0)) {
    throw InvalidArgument("FitConfig: excluded band must contain 1");
  }
  if (!(0.5 <= box.alpha_min && box.alpha_min <= box.alpha_max && box.alpha_max <= 2.0)) {
    throw InvalidArgument("FitConfig: alpha range must lie within [0.5, 2]");
  }
  if (!(-1.0 <= box.beta_min && box.beta_min <= box.beta_max && box.beta_max <= 1.0)) {
    throw InvalidArgument("FitConfig: beta range must lie within [-1, 1]");
  }
  if (!(box.log_gamma_halfwidth >= 0.0) || !(box.delta_halfwidth >= 0.0)) {
    throw InvalidArgument("FitConfig: start half-widths must be non-negative");
  }
}

std::vector<double> residuals(std::span<const double> series, const ArModel& model) {
  const std::size_t p = model.order();
  if (series.size() < p + 1) throw InvalidArgument("residuals: series must hold at least p + 1 values");
  const auto& phi = model.coeffs();
  std::vector<double> out(series.size() - p);
  for (std::size_t t = p; t < series.size(); ++t) {
    double z = series[t];
    for (std::size_t i = 0; i < p; ++i) z -= phi[i] * series[t - i - 1];
    out[t - p] = z;
  }
  return out;
}

double log_jacobian(const ArModel& model, std::size_t n_residuals) {
  if (model.order() == 0) return 0.0;
  double acc = 0.0;
  for (const auto& z : find_roots(model)) {
    if (std::abs(z) < 1.0) acc -= std::log(std::abs(z));
  }
  return static_cast<double>(n_residuals) * acc;
}

double residual_log_density(std::span<const double> resid, const StableParams& noise) {
  const StableDensity density(noise);
  double acc = 0.0;
  for (double z : resid) acc += std::max(density.logpdf(z), kLogFloor);
  return acc;
}

double log_likelihood(std::span<const double> series, const ArModel& model, const StableParams& noise) {
  const std::vector<double> resid = residuals(series, model);
  const double jac = log_jacobian(model, resid.size());
  return residual_log_density(resid, noise) + jac;
}

FitResult fit_mle(std::span<const double> series, std::size_t p, const FitConfig& config, std::uint64_t seed) {
  config.validate();
  if (p == 0) throw InvalidArgument("fit_mle: order must be at least 1");
  if (series.size() < 10 * (p + 4)) throw InvalidArgument("fit_mle: series shorter than 10 (p + 4)");
  for (double y : series) {
    if (!std::isfinite(y)) throw InvalidArgument("fit_mle: series contains non-finite values");
  }

  const std::size_t dim = p + 4;
  std::atomic<std::size_t> evaluations{0};
  auto objective = [&](std::span<const double> x) {
    ++evaluations;
    try {
      const Point pt = unpack(x, p);
      if (!(unit_circle_distance(pt.model) > kUnitCircleMargin)) return kInf;
      const double ll = log_likelihood(series, pt.model, pt.noise);
      return std::isfinite(ll) ? -ll : kInf;
    } catch (const Error&) {
      return kInf;
    }
  };

  // Starting points are drawn sequentially so they depend on the seed alone.
  Rng rng(seed);
  std::vector<std::vector<double>> starts;
  starts.reserve(config.n_starts);
  for (std::size_t i = 0; i < config.n_starts; ++i) {
    std::vector<double> phi;
    for (std::size_t attempt = 0; attempt < kRootDrawAttempts; ++attempt) {
      std::vector<double> candidate = draw_coefficients(p, config.box, rng);
      if (unit_circle_distance(ArModel(candidate)) > kUnitCircleMargin) {
        phi = std::move(candidate);
        break;
      }
    }
    if (phi.empty()) continue;
    std::vector<double> resid = residuals(series, ArModel(phi));
    std::sort(resid.begin(), resid.end());
    const double median = quantile_sorted(resid, 0.5);
    double scale = 0.5 * (quantile_sorted(resid, 0.75) - quantile_sorted(resid, 0.25));
    if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;

    std::vector<double> x = phi;
    x.push_back(rng.uniform(config.box.alpha_min, config.box.alpha_max));
    x.push_back(rng.uniform(config.box.beta_min, config.box.beta_max));
    x.push_back(std::log(scale) + rng.uniform(-config.box.log_gamma_halfwidth, config.box.log_gamma_halfwidth));
    x.push_back(median + scale * rng.uniform(-config.box.delta_halfwidth, config.box.delta_halfwidth));
    starts.push_back(std::move(x));
  }

  std::vector<double> start_values(starts.size(), kInf);
  detail::parallel_for(starts.size(), config.workers, [&](std::size_t i) { start_values[i] = objective(starts[i]); });

  std::vector<std::size_t> ranked;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (std::isfinite(start_values[i])) ranked.push_back(i);
  }
  if (ranked.empty()) throw NonConvergent("fit_mle: every starting point was rejected");
  std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    return start_values[a] != start_values[b] ? start_values[a] < start_values[b] : a < b;
  });
  ranked.resize(std::min(ranked.size(), config.n_refine));
  const double best_start = -start_values[ranked.front()];

  NelderMeadOptions nm;
  nm.tolerance = config.simplex_tol;
  nm.max_iter = config.max_iter;
  std::vector<NelderMeadResult> polished(ranked.size());
  detail::parallel_for(ranked.size(), config.workers, [&](std::size_t k) {
    const std::vector<double>& x0 = starts[ranked[k]];
    std::vector<double> steps(dim);
    for (std::size_t i = 0; i < p; ++i) steps[i] = 0.05 * std::max(1.0, std::abs(x0[i]));
    steps[p] = 0.1;
    steps[p + 1] = 0.1;
    steps[p + 2] = 0.1;
    steps[p + 3] = 0.1 * std::exp(x0[p + 2]);
    NelderMeadResult res = nelder_mead(objective, x0, steps, nm);
    // Restart from the optimum to guard against a collapsed simplex.
    for (std::size_t r = 0; r < kPolishRestarts && res.converged; ++r) {
      steps[p + 3] = 0.1 * std::exp(res.x[p + 2]);
      NelderMeadResult again = nelder_mead(objective, res.x, steps, nm);
      const bool improved = again.value < res.value;
      again.evaluations += res.evaluations;
      again.iterations += res.iterations;
      if (!improved) {
        again.x = res.x;
        again.value = res.value;
      }
      res = std::move(again);
    }
    polished[k] = std::move(res);
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < polished.size(); ++k) {
    if (polished[k].value < polished[best].value) best = k;
  }
  const Point pt = unpack(polished[best].x, p);
  FitResult out;
  out.model = pt.model;
  out.noise = pt.noise;
  out.loglik = -polished[best].value;
  out.converged = std::any_of(polished.begin(), polished.end(), [](const NelderMeadResult& r) { return r.converged; });
  out.n_evaluations = evaluations.load();
  out.best_start_loglik = best_start;
  return out;
}

}  // namespace ncar
