#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ncar/error.hpp"

namespace ncar::detail {

// Partial autocorrelations pi_1..pi_m from rho_1..rho_m. Extended precision keeps the
// recursion accurate when the Toeplitz matrix is badly conditioned (|pi_k| near 1).
inline std::vector<long double> durbin_levinson(std::span<const double> rho, std::size_t m) {
  std::vector<long double> pi(m);
  std::vector<long double> phi(m + 1, 0.0L);
  std::vector<long double> prev(m + 1, 0.0L);
  for (std::size_t k = 1; k <= m; ++k) {
    long double num = rho[k - 1];
    long double den = 1.0L;
    for (std::size_t j = 1; j < k; ++j) {
      num -= prev[j] * rho[k - j - 1];
      den -= prev[j] * rho[j - 1];
    }
    if (std::abs(den) < 1e-12L) {
      throw SingularToeplitz("Durbin-Levinson: singular Toeplitz system at lag " + std::to_string(k));
    }
    const long double pk = num / den;
    phi[k] = pk;
    for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - pk * prev[k - j];
    pi[k - 1] = pk;
    std::copy(phi.begin(), phi.begin() + static_cast<long>(k) + 1, prev.begin());
  }
  return pi;
}

}  // namespace ncar::detail
