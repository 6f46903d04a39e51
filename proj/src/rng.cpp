#include "rkcca/rng.hpp"

#include <cmath>
#include <numbers>

namespace rkcca {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t row, std::uint64_t purpose,
                               std::uint64_t counter) const noexcept {
  std::uint64_t h = splitmix64(key_ ^ row);
  h = splitmix64(h ^ (purpose * 0x8cb92ba72f3d8dd7ULL));
  return splitmix64(h ^ (counter * 0xabc98388fb8fac03ULL));
}

double CounterRng::uniform(std::uint64_t row, std::uint64_t purpose,
                           std::uint64_t counter) const noexcept {
  return (static_cast<double>(bits(row, purpose, counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi, std::uint64_t row, std::uint64_t purpose,
                           std::uint64_t counter) const noexcept {
  return lo + (hi - lo) * uniform(row, purpose, counter);
}

double CounterRng::normal(std::uint64_t row, std::uint64_t purpose, std::uint64_t counter) const noexcept {
  const double u1 = uniform(row, purpose, 2 * counter);
  const double u2 = uniform(row, purpose, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::derive(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed ^ 0x5851f42d4c957f2dULL) + index);
}

}  // namespace rkcca
