#pragma once

#include <cstdint>
#include <random>

namespace ncar {

/// SplitMix64 finalizer. Used as the published hash for child-seed derivation.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic child seed for stream `index` under `master`.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/**
 * @brief Explicit random-number state passed by reference and advanced by callers.
 *
 * Wraps std::mt19937_64, whose output sequence is fixed by the standard. Variates are
 * generated from raw engine output here rather than through <random> distributions,
 * which are implementation-defined, so streams are reproducible across toolchains.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    // 53 random bits, shifted by half an ulp so 0 is never produced.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard exponential.
  double exponential() noexcept;

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t next_u64() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ncar
