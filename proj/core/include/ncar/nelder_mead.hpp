#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ncar {

struct NelderMeadOptions {
  double tolerance = 1e-8;  ///< stop when f_worst - f_best <= tolerance * max(1, |f_best|)
  std::size_t max_iter = 2000;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Downhill simplex minimization. The start simplex is x0 plus x0 + steps[i] e_i.
/// Non-finite objective values are treated as +infinity.
[[nodiscard]] NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                                           std::vector<double> x0, std::span<const double> steps,
                                           const NelderMeadOptions& options = {});

}  // namespace ncar
