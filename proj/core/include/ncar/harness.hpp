#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ncar/ar_model.hpp"
#include "ncar/diagnostics.hpp"
#include "ncar/estimation.hpp"
#include "ncar/portmanteau.hpp"
#include "ncar/stable.hpp"

namespace ncar {

/// Share of failed fits above which an experiment is flagged.
inline constexpr double kFailureFlagFraction = 0.2;

/// FitConfig used by experiments unless overridden: 200 starts, 4 polished.
[[nodiscard]] FitConfig desk_fit_config();

struct ExperimentSpec {
  ArModel true_model;
  StableParams noise;
  std::size_t n = 500;
  std::size_t fit_order = 1;
  std::vector<std::size_t> lags{5, 10, 15, 20, 25};
  std::size_t replications = 200;
  double level = 0.05;
  FitConfig fit_config = desk_fit_config();
  std::uint64_t master_seed = 1;
  TrimSpec trim;
  /// Replication-level threads. Output does not depend on this.
  std::size_t workers = 1;

  void validate() const;
};

struct RejectionCell {
  Statistic statistic = Statistic::Q_lb;
  std::size_t m = 0;
  std::size_t rejections = 0;
  /// Replications in which this statistic could be evaluated.
  std::size_t replications = 0;

  [[nodiscard]] double fraction() const noexcept {
    return replications == 0 ? 0.0 : static_cast<double>(rejections) / static_cast<double>(replications);
  }
};

struct ReplicationOutcome {
  std::uint64_t seed = 0;
  bool converged = false;
  bool excluded = false;
  std::string error;
};

struct ExperimentResult {
  ExperimentSpec spec;
  bool known_parameters = false;
  std::vector<RejectionCell> cells;  ///< statistic-major within each lag, lags in spec order
  std::vector<ReplicationOutcome> outcomes;
  std::size_t excluded = 0;
  bool flagged = false;
  double wall_seconds = 0.0;

  [[nodiscard]] const RejectionCell& cell(Statistic s, std::size_t m) const;
};

/// Simulate, fit, trim and test `replications` paths; see ExperimentSpec.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentSpec& spec);

/// As run_experiment, but residuals come from the true model instead of a fit.
[[nodiscard]] ExperimentResult size_under_known_params(const ExperimentSpec& spec);

/// CSV with header statistic,m,rejections,replications,fraction.
[[nodiscard]] std::string to_csv(const ExperimentResult& result);

/// JSON document mirroring ExperimentResult (pretty-printed, trailing newline).
[[nodiscard]] std::string to_json(const ExperimentResult& result);

/// Parses an ExperimentSpec from JSON text. Missing or ill-typed fields raise InvalidArgument naming the key.
[[nodiscard]] ExperimentSpec spec_from_json(const std::string& text);

/// Inverse of spec_from_json.
[[nodiscard]] std::string spec_to_json(const ExperimentSpec& spec);

}  // namespace ncar
