#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncar/diagnostics.hpp"

namespace ncar {

enum class Statistic { Q_lb, Q_mt, Q_gv, Q_wb, Q_wl, Q_wm, Q_rk, Q_rks };

inline constexpr std::array<Statistic, 8> kAllStatistics{Statistic::Q_lb, Statistic::Q_mt, Statistic::Q_gv,
                                                         Statistic::Q_wb, Statistic::Q_wl, Statistic::Q_wm,
                                                         Statistic::Q_rk, Statistic::Q_rks};

[[nodiscard]] std::string_view to_string(Statistic s) noexcept;
[[nodiscard]] std::optional<Statistic> statistic_from_string(std::string_view name) noexcept;

/// Reference law of a statistic: chi-square (possibly fractional df) or gamma(shape, scale).
struct ReferenceDistribution {
  enum class Family { chi_square, gamma };

  Family family = Family::chi_square;
  double df = 1.0;     ///< chi-square only
  double shape = 0.5;  ///< gamma only
  double scale = 2.0;  ///< gamma only

  static ReferenceDistribution chi_square(double df);
  static ReferenceDistribution gamma(double shape, double scale);

  [[nodiscard]] double cdf(double x) const;
  [[nodiscard]] double sf(double x) const;
  [[nodiscard]] std::string describe() const;
};

struct TestReport {
  Statistic name = Statistic::Q_lb;
  std::size_t m = 0;
  double statistic = 0.0;
  ReferenceDistribution distribution;
  double p_value = 1.0;
};

/// Gamma law matching the first two moments of sum_k w_k chi2_1 (independent terms).
[[nodiscard]] ReferenceDistribution weighted_chisq_gamma(std::span<const double> weights);

/// CDF of sum_k w_k chi2_1 by the moment-matched gamma approximation.
[[nodiscard]] double weighted_chisq_cdf(double x, std::span<const double> weights);

/// Weights (m - k + 1) / m, k = 1..m.
[[nodiscard]] std::vector<double> linear_weights(std::size_t m);

[[nodiscard]] TestReport q_ljung_box(const CorrelationVector& acf, std::size_t m);
[[nodiscard]] TestReport q_monti(const CorrelationVector& pacf, std::size_t m);
[[nodiscard]] TestReport q_box_pierce_weighted(const CorrelationVector& acf, std::size_t m);
[[nodiscard]] TestReport q_ljung_box_weighted(const CorrelationVector& acf, std::size_t m);
[[nodiscard]] TestReport q_monti_weighted(const CorrelationVector& pacf, std::size_t m);
[[nodiscard]] TestReport q_gvtest(const CorrelationVector& acf, std::size_t m);
[[nodiscard]] TestReport q_rank(const CorrelationVector& rankcorr, std::size_t m);
[[nodiscard]] TestReport q_rank_squared(const CorrelationVector& rankcorr, std::size_t m);

/// log det of the (m+1)x(m+1) Toeplitz matrix of (1, rho_1, ..., rho_m) as
/// sum_k (m - k + 1) log(1 - pi_k^2). Throws NotPositiveDefinite if some |pi_k| >= 1.
[[nodiscard]] double toeplitz_log_det(const CorrelationVector& acf, std::size_t m);

/// One (statistic, m) cell of a battery; `report` is empty when `error` says why.
struct BatteryRow {
  Statistic name = Statistic::Q_lb;
  std::size_t m = 0;
  std::optional<TestReport> report;
  std::string error;
};

/// All eight statistics at every lag in `lags` for a residual series, trimming with `spec`.
/// A numerical failure in one family of statistics is recorded on its rows only.
[[nodiscard]] std::vector<BatteryRow> run_battery(std::span<const double> residuals, std::span<const std::size_t> lags,
                                                  const TrimSpec& spec = {});

}  // namespace ncar
