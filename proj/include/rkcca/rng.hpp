#pragma once

#include <cstdint>

namespace rkcca {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based random source. Every draw is a pure function of
/// (seed, stream, row, purpose, counter), so draws for one row or column
/// never depend on how many values were consumed elsewhere. Generators use
/// distinct `purpose` tags for each random quantity of a row.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t bits(std::uint64_t row, std::uint64_t purpose, std::uint64_t counter = 0) const noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t row, std::uint64_t purpose, std::uint64_t counter = 0) const noexcept;
  double uniform(double lo, double hi, std::uint64_t row, std::uint64_t purpose,
                 std::uint64_t counter = 0) const noexcept;
  /// Standard normal by Box-Muller on two uniforms of the same counter slot.
  double normal(std::uint64_t row, std::uint64_t purpose, std::uint64_t counter = 0) const noexcept;

  /// Derives an independent stream key (for replicates, folds, ...).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept;

 private:
  std::uint64_t key_;
};

}  // namespace rkcca
