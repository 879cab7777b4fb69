#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace vcd {

// Counter-based generator: every draw is a pure function of (seed, counter),
// so results do not depend on the standard library's distributions and are
// identical across platforms and thread schedules.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t counter) noexcept {
  return mix64(seed ^ mix64(counter));
}

// Uniform in [0,1).
constexpr double uniform01(std::uint64_t seed, std::uint64_t counter) noexcept {
  return static_cast<double>(hash_counter(seed, counter) >> 11) * 0x1p-53;
}

// Standard normal via Box-Muller on the counter pair (2c, 2c+1).
inline double gaussian(std::uint64_t seed, std::uint64_t counter) noexcept {
  const double u1 = static_cast<double>((hash_counter(seed, 2 * counter) >> 11) + 1) * 0x1p-53;
  const double u2 = uniform01(seed, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Sequential convenience wrapper.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  double uniform() noexcept { return uniform01(seed_, counter_++); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) noexcept {  // inclusive
    return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace vcd
