#include "ncar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ncar/error.hpp"
#include "durbin_levinson.hpp"

namespace ncar {

void TrimSpec::validate() const {
  if (!(lambda_lower > 0.0 && lambda_lower < 0.5)) throw InvalidArgument("trim: lambda_lower must lie in (0, 0.5)");
  if (!(lambda_upper > 0.5 && lambda_upper < 1.0)) throw InvalidArgument("trim: lambda_upper must lie in (0.5, 1)");
}

std::string_view to_string(CorrelationKind kind) noexcept {
  switch (kind) {
    case CorrelationKind::trimmed_acf:
      return "trimmed_acf";
    case CorrelationKind::pacf:
      return "pacf";
    case CorrelationKind::rank:
      return "rank";
    case CorrelationKind::rank_squared:
      return "rank_squared";
  }
  return "unknown";
}

std::size_t order_statistic_index(std::size_t n, double lambda) {
  const double x = static_cast<double>(n) * lambda;
  // 100 * 0.99 may round to 99.00000000000001; that is still index 99.
  const double k = std::ceil(x - 1e-9 * std::max(1.0, x));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(k, 1.0)), 1, n);
}

ResidualSet trim(std::span<const double> raw, const TrimSpec& spec) {
  spec.validate();
  const std::size_t n = raw.size();
  if (n == 0) throw InvalidArgument("trim: no residuals");
  // ceil(n lambda) is at least 1 for every n; the band only needs room between the bounds.
  const std::size_t lo_rank = order_statistic_index(n, spec.lambda_lower);
  const std::size_t hi_rank = order_statistic_index(n, spec.lambda_upper);
  if (lo_rank >= hi_rank) {
    throw InvalidArgument("trim: " + std::to_string(n) + " residuals leave no band between the order statistics");
  }
  for (double z : raw) {
    if (!std::isfinite(z)) throw InvalidArgument("trim: residuals must be finite");
  }
  std::vector<double> sorted(raw.begin(), raw.end());
  const std::size_t lo_idx = lo_rank - 1;
  const std::size_t hi_idx = hi_rank - 1;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(lo_idx), sorted.end());
  const double lower = sorted[lo_idx];
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(hi_idx), sorted.end());
  const double upper = sorted[hi_idx];

  ResidualSet rs;
  rs.raw.assign(raw.begin(), raw.end());
  rs.lower_bound = lower;
  rs.upper_bound = upper;
  rs.trimmed.resize(n);
  rs.kept_mask.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const bool keep = lower < raw[t] && raw[t] < upper;
    rs.kept_mask[t] = keep;
    rs.trimmed[t] = keep ? raw[t] : 0.0;
  }
  return rs;
}

CorrelationVector trimmed_acf(const ResidualSet& rs, std::size_t m) { return trimmed_acf(rs.trimmed, m); }

CorrelationVector trimmed_acf(std::span<const double> tau, std::size_t m) {
  const std::size_t n = tau.size();
  if (m == 0) throw InvalidArgument("trimmed_acf: m must be positive");
  if (m >= n) throw InvalidArgument("trimmed_acf: m must be smaller than n");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : tau) {
    sum += v;
    sum_sq += v * v;
  }
  const double denom = sum_sq - sum * sum / static_cast<double>(n);
  if (!(denom > 1e-12 * sum_sq)) throw DegenerateVariance("trimmed_acf: degenerate variance (all trimmed residuals are equal)");

  CorrelationVector out;
  out.n = n;
  out.kind = CorrelationKind::trimmed_acf;
  out.values.resize(m);
  for (std::size_t k = 1; k <= m; ++k) {
    double cross = 0.0;
    double lead = 0.0;
    double lag = 0.0;
    for (std::size_t t = k; t < n; ++t) {
      cross += tau[t] * tau[t - k];
      lead += tau[t];
      lag += tau[t - k];
    }
    out.values[k - 1] = (cross - lead * lag / static_cast<double>(n - k)) / denom;
  }
  return out;
}

CorrelationVector pacf_from_acf(const CorrelationVector& acf, std::size_t m) {
  if (m == 0) throw InvalidArgument("pacf_from_acf: m must be positive");
  if (acf.lags() < m) throw InvalidArgument("pacf_from_acf: autocorrelations shorter than m");
  if (acf.kind != CorrelationKind::trimmed_acf) throw InvalidArgument("pacf_from_acf: input must be autocorrelations");
  CorrelationVector out;
  out.n = acf.n;
  out.kind = CorrelationKind::pacf;
  out.values.resize(m);

  const std::vector<long double> pi = detail::durbin_levinson(acf.values, m);
  for (std::size_t k = 0; k < m; ++k) out.values[k] = static_cast<double>(pi[k]);
  return out;
}

std::vector<double> normalized_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
    // Every tied value counts all observations up to the end of its tie block.
    const double r = static_cast<double>(j + 1) / static_cast<double>(n);
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

CorrelationVector rank_correlations(std::span<const double> raw, std::size_t m, bool squared) {
  const std::size_t n = raw.size();
  if (m == 0) throw InvalidArgument("rank_correlations: m must be positive");
  if (n <= m) throw InvalidArgument("rank_correlations: need more observations than lags");
  for (double v : raw) {
    if (std::isnan(v)) throw InvalidArgument("rank_correlations: NaN in input");
  }
  std::vector<double> ranks;
  if (squared) {
    std::vector<double> sq(n);
    std::transform(raw.begin(), raw.end(), sq.begin(), [](double v) { return v * v; });
    ranks = normalized_ranks(sq);
  } else {
    ranks = normalized_ranks(raw);
  }
  for (double& r : ranks) r -= 0.5;

  CorrelationVector out;
  out.n = n;
  out.kind = squared ? CorrelationKind::rank_squared : CorrelationKind::rank;
  out.values.resize(m);
  for (std::size_t i = 1; i <= m; ++i) {
    double acc = 0.0;
    for (std::size_t t = 0; t + i < n; ++t) acc += ranks[t] * ranks[t + i];
    out.values[i - 1] = acc / static_cast<double>(n);
  }
  return out;
}

}  // namespace ncar
