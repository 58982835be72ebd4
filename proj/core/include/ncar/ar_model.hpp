#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ncar/rng.hpp"
#include "ncar/stable.hpp"

namespace ncar {

/// Minimum distance | |z| - 1 | a root of phi(z) must keep from the unit circle.
inline constexpr double kUnitCircleMargin = 1e-6;

/// Default truncation tolerance for the two-sided MA coefficients.
inline constexpr double kLaurentTolerance = 1e-12;

/// Hard cap on the Laurent truncation index.
inline constexpr std::size_t kLaurentCap = 1'000'000;

/**
 * @brief Autoregression phi(B) Y_t = Z_t with phi(z) = 1 - phi_1 z - ... - phi_p z^p.
 *
 * The model may be causal, purely non-causal, or mixed. Order 0 (empty coefficients) is
 * the white-noise model phi(z) = 1. Stationarity (no root on the unit circle) is not
 * enforced at construction; find_roots() reports it.
 */
class ArModel {
 public:
  ArModel() = default;
  explicit ArModel(std::vector<double> coeffs);

  [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] std::size_t order() const noexcept { return coeffs_.size(); }

  /// Ascending coefficients of phi(z): (1, -phi_1, ..., -phi_p).
  [[nodiscard]] std::vector<double> polynomial() const;

  [[nodiscard]] std::complex<double> evaluate(std::complex<double> z) const;

  [[nodiscard]] bool operator==(const ArModel&) const = default;

 private:
  std::vector<double> coeffs_;
};

/// Roots of a real polynomial given by ascending coefficients, by Aberth-Ehrlich iteration.
/// Trailing zero coefficients are dropped. Complex roots come out in exact conjugate pairs.
[[nodiscard]] std::vector<std::complex<double>> polynomial_roots(std::span<const double> ascending);

/// All roots of phi(z); throws UnitCircleRoot if any lies within kUnitCircleMargin of |z| = 1.
[[nodiscard]] std::vector<std::complex<double>> find_roots(const ArModel& model);

/// Smallest | |z| - 1 | over the roots of phi(z); infinity for order 0.
[[nodiscard]] double unit_circle_distance(const ArModel& model);

/**
 * @brief phi(z) = (1 - theta_1 z - ... - theta_r z^r)(1 - theta_{r+1} z - ... - theta_{r+s} z^s).
 *
 * The first factor carries the roots outside the unit circle (causal part), the second the
 * roots inside it (purely non-causal part).
 */
struct Factorization {
  std::vector<double> causal_coeffs;     ///< theta_1 ... theta_r
  std::vector<double> noncausal_coeffs;  ///< theta_{r+1} ... theta_{r+s}

  [[nodiscard]] std::size_t r() const noexcept { return causal_coeffs.size(); }
  [[nodiscard]] std::size_t s() const noexcept { return noncausal_coeffs.size(); }

  /// Coefficients phi_1..phi_{r+s} of the product of both factors.
  [[nodiscard]] std::vector<double> expand() const;
};

[[nodiscard]] Factorization factorize(const ArModel& model);

/// The causal representation: the same model with every root inside the unit circle
/// replaced by its reciprocal. Gaussian processes cannot distinguish the two.
[[nodiscard]] ArModel causal_representation(const ArModel& model);

/**
 * @brief Truncated Laurent expansion 1/phi(z) = sum_j psi_j z^j over an annulus containing |z| = 1.
 *
 * psi_plus holds psi_0..psi_K and psi_minus holds psi_{-1}..psi_{-K}; every coefficient with
 * |j| >= K has magnitude below the truncation tolerance.
 */
struct LaurentCoeffs {
  std::vector<double> psi_plus;
  std::vector<double> psi_minus;

  [[nodiscard]] std::size_t truncation() const noexcept { return psi_minus.size(); }

  /// psi_j for any integer j; zero beyond the truncation.
  [[nodiscard]] double at(long j) const noexcept;
};

[[nodiscard]] LaurentCoeffs laurent_coeffs(const ArModel& model, double tol = kLaurentTolerance);

/// A simulated path together with the innovations aligned to it: values[t] was built with
/// innovations[t] as its Z_t term.
struct SimulatedPath {
  std::vector<double> values;
  std::vector<double> innovations;
};

/**
 * @brief Simulate Y_{-p+1}, ..., Y_n of the strictly stationary solution by finite two-sided
 * convolution of n + p + 2 * burn stable innovations with the truncated psi sequence.
 *
 * `burn` must be at least the Laurent truncation K; the overloads without `burn` use K.
 */
[[nodiscard]] SimulatedPath simulate_path(const ArModel& model, const StableParams& noise, std::size_t n,
                                          std::size_t burn, Rng& rng);
[[nodiscard]] SimulatedPath simulate_path(const ArModel& model, const StableParams& noise, std::size_t n,
                                          Rng& rng);

[[nodiscard]] std::vector<double> simulate(const ArModel& model, const StableParams& noise, std::size_t n,
                                           std::size_t burn, std::uint64_t seed);
[[nodiscard]] std::vector<double> simulate(const ArModel& model, const StableParams& noise, std::size_t n,
                                           std::uint64_t seed);

}  // namespace ncar
