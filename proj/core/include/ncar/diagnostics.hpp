#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ncar {

/// Lower and upper trimming percentiles.
struct TrimSpec {
  double lambda_lower = 0.01;
  double lambda_upper = 0.99;

  void validate() const;
};

/**
 * @brief Residuals with the two-sided order-statistic trimming applied.
 *
 * trimmed[t] = raw[t] when lower_bound < raw[t] < upper_bound and 0 otherwise, where the
 * bounds are the ceil(n lambda_lower)-th and ceil(n lambda_upper)-th order statistics.
 */
struct ResidualSet {
  std::vector<double> raw;
  std::vector<double> trimmed;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  std::vector<bool> kept_mask;
};

enum class CorrelationKind { trimmed_acf, pacf, rank, rank_squared };

[[nodiscard]] std::string_view to_string(CorrelationKind kind) noexcept;

/// Lag-indexed statistics: values[k - 1] is the lag-k value, n the normalizing sample size.
struct CorrelationVector {
  std::vector<double> values;
  std::size_t n = 0;
  CorrelationKind kind = CorrelationKind::trimmed_acf;

  [[nodiscard]] std::size_t lags() const noexcept { return values.size(); }
  [[nodiscard]] double at_lag(std::size_t k) const { return values.at(k - 1); }
};

/// 1-based order-statistic index ceil(n lambda), guarded against rounding just above an integer.
[[nodiscard]] std::size_t order_statistic_index(std::size_t n, double lambda);

[[nodiscard]] ResidualSet trim(std::span<const double> raw, const TrimSpec& spec = {});

/// Sample autocorrelations of the trimmed residuals at lags 1..m, centering the numerator
/// with means over the n - k overlapping terms and the denominator with the full-sample mean.
[[nodiscard]] CorrelationVector trimmed_acf(const ResidualSet& rs, std::size_t m);
[[nodiscard]] CorrelationVector trimmed_acf(std::span<const double> trimmed, std::size_t m);

/// Partial autocorrelations 1..m from an autocorrelation vector by Durbin-Levinson.
[[nodiscard]] CorrelationVector pacf_from_acf(const CorrelationVector& acf, std::size_t m);

/// Normalized ranks r_j = #{i : x_i <= x_j} / n.
[[nodiscard]] std::vector<double> normalized_ranks(std::span<const double> x);

/// gamma_i = (1/n) sum_{t=1}^{n-i} (r_t - 1/2)(r_{t+i} - 1/2), i = 1..m, with ranks taken of
/// raw or, when `squared` is set, of raw squared.
[[nodiscard]] CorrelationVector rank_correlations(std::span<const double> raw, std::size_t m, bool squared);

}  // namespace ncar
