#include "ncar/portmanteau.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "ncar/error.hpp"
#include "ncar/special.hpp"
#include "durbin_levinson.hpp"

namespace ncar {
namespace {

void check_input(const CorrelationVector& cv, std::size_t m, CorrelationKind kind, const char* who) {
  if (cv.kind != kind) {
    throw InvalidArgument(std::string(who) + ": expected correlations of kind " + std::string(to_string(kind)) +
                          ", got " + std::string(to_string(cv.kind)));
  }
  if (m == 0) throw InvalidArgument(std::string(who) + ": m must be positive");
  if (m >= cv.n) throw InvalidArgument(std::string(who) + ": m must be smaller than n");
  if (cv.lags() < m) throw InvalidArgument(std::string(who) + ": fewer than m lags supplied");
  for (std::size_t k = 0; k < m; ++k) {
    if (!std::isfinite(cv.values[k])) throw InvalidArgument(std::string(who) + ": non-finite correlation");
  }
}

TestReport make_report(Statistic name, std::size_t m, double stat, const ReferenceDistribution& dist) {
  if (!(stat > 0.0)) stat = 0.0;  // also turns -0 into +0
  return TestReport{name, m, stat, dist, std::clamp(dist.sf(stat), 0.0, 1.0)};
}

// n (n + 2) sum_k w_k v_k^2 / (n - k).
double ljung_box_sum(const CorrelationVector& cv, std::size_t m, bool weighted) {
  const double n = static_cast<double>(cv.n);
  double acc = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double w = weighted ? static_cast<double>(m - k + 1) / static_cast<double>(m) : 1.0;
    const double v = cv.values[k - 1];
    acc += w * v * v / (n - static_cast<double>(k));
  }
  return n * (n + 2.0) * acc;
}

}  // namespace

std::string_view to_string(Statistic s) noexcept {
  switch (s) {
    case Statistic::Q_lb:
      return "Q_lb";
    case Statistic::Q_mt:
      return "Q_mt";
    case Statistic::Q_gv:
      return "Q_gv";
    case Statistic::Q_wb:
      return "Q_wb";
    case Statistic::Q_wl:
      return "Q_wl";
    case Statistic::Q_wm:
      return "Q_wm";
    case Statistic::Q_rk:
      return "Q_rk";
    case Statistic::Q_rks:
      return "Q_rks";
  }
  return "unknown";
}

std::optional<Statistic> statistic_from_string(std::string_view name) noexcept {
  for (Statistic s : kAllStatistics) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

ReferenceDistribution ReferenceDistribution::chi_square(double df) {
  if (!(df > 0.0)) throw InvalidArgument("chi-square df must be positive");
  ReferenceDistribution d;
  d.family = Family::chi_square;
  d.df = df;
  return d;
}

ReferenceDistribution ReferenceDistribution::gamma(double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0)) throw InvalidArgument("gamma shape and scale must be positive");
  ReferenceDistribution d;
  d.family = Family::gamma;
  d.shape = shape;
  d.scale = scale;
  return d;
}

double ReferenceDistribution::cdf(double x) const {
  return family == Family::chi_square ? special::chisq_cdf(x, df) : special::gamma_cdf(x, shape, scale);
}

double ReferenceDistribution::sf(double x) const {
  return family == Family::chi_square ? special::chisq_sf(x, df) : special::gamma_sf(x, shape, scale);
}

std::string ReferenceDistribution::describe() const {
  char buf[96];
  if (family == Family::chi_square) {
    std::snprintf(buf, sizeof buf, "chisq(df=%.17g)", df);
  } else {
    std::snprintf(buf, sizeof buf, "gamma(shape=%.17g,scale=%.17g)", shape, scale);
  }
  return buf;
}

ReferenceDistribution weighted_chisq_gamma(std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgument("weighted_chisq: no weights");
  double s1 = 0.0;
  double s2 = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("weighted_chisq: weights must be positive");
    s1 += w;
    s2 += w * w;
  }
  return ReferenceDistribution::gamma(s1 * s1 / (2.0 * s2), 2.0 * s2 / s1);
}

double weighted_chisq_cdf(double x, std::span<const double> weights) { return weighted_chisq_gamma(weights).cdf(x); }

std::vector<double> linear_weights(std::size_t m) {
  if (m == 0) throw InvalidArgument("linear_weights: m must be positive");
  std::vector<double> w(m);
  for (std::size_t k = 1; k <= m; ++k) w[k - 1] = static_cast<double>(m - k + 1) / static_cast<double>(m);
  return w;
}

TestReport q_ljung_box(const CorrelationVector& acf, std::size_t m) {
  check_input(acf, m, CorrelationKind::trimmed_acf, "q_ljung_box");
  return make_report(Statistic::Q_lb, m, ljung_box_sum(acf, m, false),
                     ReferenceDistribution::chi_square(static_cast<double>(m)));
}

TestReport q_monti(const CorrelationVector& pacf, std::size_t m) {
  check_input(pacf, m, CorrelationKind::pacf, "q_monti");
  return make_report(Statistic::Q_mt, m, ljung_box_sum(pacf, m, false),
                     ReferenceDistribution::chi_square(static_cast<double>(m)));
}

TestReport q_box_pierce_weighted(const CorrelationVector& acf, std::size_t m) {
  check_input(acf, m, CorrelationKind::trimmed_acf, "q_box_pierce_weighted");
  const std::vector<double> w = linear_weights(m);
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) acc += w[k] * acf.values[k] * acf.values[k];
  return make_report(Statistic::Q_wb, m, static_cast<double>(acf.n) * acc, weighted_chisq_gamma(w));
}

TestReport q_ljung_box_weighted(const CorrelationVector& acf, std::size_t m) {
  check_input(acf, m, CorrelationKind::trimmed_acf, "q_ljung_box_weighted");
  return make_report(Statistic::Q_wl, m, ljung_box_sum(acf, m, true), weighted_chisq_gamma(linear_weights(m)));
}

TestReport q_monti_weighted(const CorrelationVector& pacf, std::size_t m) {
  check_input(pacf, m, CorrelationKind::pacf, "q_monti_weighted");
  return make_report(Statistic::Q_wm, m, ljung_box_sum(pacf, m, true), weighted_chisq_gamma(linear_weights(m)));
}

double toeplitz_log_det(const CorrelationVector& acf, std::size_t m) {
  if (m == 0 || acf.lags() < m) throw InvalidArgument("toeplitz_log_det: need 1 <= m <= number of lags");
  std::vector<long double> pi;
  try {
    pi = detail::durbin_levinson(acf.values, m);
  } catch (const SingularToeplitz& e) {
    throw NotPositiveDefinite(std::string("Toeplitz autocorrelation matrix is singular: ") + e.what());
  }
  long double acc = 0.0L;
  for (std::size_t k = 1; k <= m; ++k) {
    const long double p = pi[k - 1];
    if (!(std::abs(p) < 1.0L)) {
      throw NotPositiveDefinite("Toeplitz autocorrelation matrix is not positive definite (|pi_" +
                                std::to_string(k) + "| >= 1)");
    }
    acc += static_cast<long double>(m - k + 1) * std::log1p(-p * p);
  }
  return static_cast<double>(acc);
}

TestReport q_gvtest(const CorrelationVector& acf, std::size_t m) {
  check_input(acf, m, CorrelationKind::trimmed_acf, "q_gvtest");
  const double md = static_cast<double>(m);
  const double stat = -3.0 * static_cast<double>(acf.n) / (2.0 * md + 1.0) * toeplitz_log_det(acf, m);
  return make_report(Statistic::Q_gv, m, stat, ReferenceDistribution::chi_square(1.5 * md * (md + 1.0) / (2.0 * md + 1.0)));
}

namespace {

TestReport rank_statistic(Statistic name, const CorrelationVector& cv, std::size_t m) {
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) acc += cv.values[k] * cv.values[k];
  return make_report(name, m, 144.0 * static_cast<double>(cv.n) * acc,
                     ReferenceDistribution::chi_square(static_cast<double>(m)));
}

}  // namespace

TestReport q_rank(const CorrelationVector& rankcorr, std::size_t m) {
  check_input(rankcorr, m, CorrelationKind::rank, "q_rank");
  return rank_statistic(Statistic::Q_rk, rankcorr, m);
}

TestReport q_rank_squared(const CorrelationVector& rankcorr, std::size_t m) {
  check_input(rankcorr, m, CorrelationKind::rank_squared, "q_rank_squared");
  return rank_statistic(Statistic::Q_rks, rankcorr, m);
}

std::vector<BatteryRow> run_battery(std::span<const double> residuals, std::span<const std::size_t> lags,
                                    const TrimSpec& spec) {
  if (lags.empty()) throw InvalidArgument("run_battery: no lags requested");
  const std::size_t n = residuals.size();
  for (std::size_t m : lags) {
    if (m == 0 || m >= n) throw InvalidArgument("run_battery: every lag must lie in [1, n)");
  }
  const std::size_t max_m = *std::max_element(lags.begin(), lags.end());

  // Each family is computed once at the largest lag; failures are kept as messages.
  std::optional<CorrelationVector> acf;
  std::optional<CorrelationVector> pacf;
  std::string acf_error;
  std::string pacf_error;
  try {
    acf = trimmed_acf(trim(residuals, spec), max_m);
  } catch (const Error& e) {
    acf_error = e.what();
  }
  if (acf) {
    try {
      pacf = pacf_from_acf(*acf, max_m);
    } catch (const Error& e) {
      pacf_error = e.what();
    }
  } else {
    pacf_error = acf_error;
  }
  const CorrelationVector ranks = rank_correlations(residuals, max_m, false);
  const CorrelationVector ranks_sq = rank_correlations(residuals, max_m, true);

  std::vector<BatteryRow> rows;
  for (std::size_t m : lags) {
    for (Statistic s : kAllStatistics) {
      BatteryRow row{s, m, std::nullopt, {}};
      try {
        switch (s) {
          case Statistic::Q_lb:
          case Statistic::Q_gv:
          case Statistic::Q_wb:
          case Statistic::Q_wl:
            if (!acf) throw Error(acf_error);
            row.report = s == Statistic::Q_lb   ? q_ljung_box(*acf, m)
                         : s == Statistic::Q_gv ? q_gvtest(*acf, m)
                         : s == Statistic::Q_wb ? q_box_pierce_weighted(*acf, m)
                                                : q_ljung_box_weighted(*acf, m);
            break;
          case Statistic::Q_mt:
          case Statistic::Q_wm:
            if (!pacf) throw Error(pacf_error);
            row.report = s == Statistic::Q_mt ? q_monti(*pacf, m) : q_monti_weighted(*pacf, m);
            break;
          case Statistic::Q_rk:
            row.report = q_rank(ranks, m);
            break;
          case Statistic::Q_rks:
            row.report = q_rank_squared(ranks_sq, m);
            break;
        }
      } catch (const Error& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace ncar
