#pragma once

#include <cmath>
#include <cstdint>

namespace qpk {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw i is mix64(key + i * golden). The stream is
/// a pure function of (key, i), so replays are bit-identical on every
/// platform with IEEE doubles.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(mix64(key)) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential variate of the given rate, by inversion.
  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

  /// Standard normal by Box-Muller (one of the pair is discarded).
  double normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qpk
