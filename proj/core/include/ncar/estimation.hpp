#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ncar/ar_model.hpp"
#include "ncar/stable.hpp"

namespace ncar {

/// Region from which random starting points are drawn.
struct StartBox {
  double root_modulus_min = 0.2;
  double root_modulus_max = 5.0;
  double excluded_lower = 0.99;  ///< moduli in (excluded_lower, excluded_upper) are redrawn
  double excluded_upper = 1.01;
  double alpha_min = 0.5;
  double alpha_max = 2.0;
  double beta_min = -1.0;
  double beta_max = 1.0;
  double log_gamma_halfwidth = 1.0;  ///< log gamma drawn within this distance of the residual scale
  double delta_halfwidth = 0.5;      ///< delta drawn within this many residual scales of the median
};

struct FitConfig {
  std::size_t n_starts = 1200;
  std::size_t n_refine = 8;
  double simplex_tol = 1e-8;
  std::size_t max_iter = 2000;
  StartBox box{};
  std::size_t workers = 1;

  void validate() const;
};

struct FitResult {
  ArModel model;
  StableParams noise;
  double loglik = 0.0;
  bool converged = false;
  std::size_t n_evaluations = 0;
  double best_start_loglik = 0.0;  ///< log-likelihood of the best unpolished start
};

/// Z_t = Y_t - phi_1 Y_{t-1} - ... - phi_p Y_{t-p} for t = 1..n, given Y_{-p+1}..Y_n.
[[nodiscard]] std::vector<double> residuals(std::span<const double> series, const ArModel& model);

/// n log |theta_{r+s}|: the log-Jacobian of the map from the observed stretch to the
/// residuals. Zero for a causal model.
[[nodiscard]] double log_jacobian(const ArModel& model, std::size_t n_residuals);

/// Sum of stable log-densities of the residuals. Every term is floored at the log of the
/// smallest subnormal double, so the result is finite.
[[nodiscard]] double residual_log_density(std::span<const double> resid, const StableParams& noise);

/// Log-likelihood of (phi, alpha, beta, gamma, delta): residual_log_density plus log_jacobian.
/// Throws UnitCircleRoot for a model that violates the unit-circle margin.
[[nodiscard]] double log_likelihood(std::span<const double> series, const ArModel& model, const StableParams& noise);

/**
 * @brief Multistart maximum likelihood: score n_starts random points, polish the n_refine
 * best by Nelder-Mead and return the best polished point.
 *
 * The result depends only on (series, p, config minus workers, seed).
 */
[[nodiscard]] FitResult fit_mle(std::span<const double> series, std::size_t p, const FitConfig& config,
                                std::uint64_t seed);

}  // namespace ncar
