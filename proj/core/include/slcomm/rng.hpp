#pragma once

#include <cstdint>
#include <limits>

namespace slcomm {

/// Counter-based pseudorandom generator.
///
/// The n-th output of a stream is a pure function of (key, n): it is the
/// SplitMix64 finalizer applied to `key + n * golden_gamma`. Streams are
/// derived with split(), so every machine, trial and protocol phase can own an
/// independent, reproducible sequence regardless of scheduling order.
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random> and
/// Boost.Random distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  /// Child stream keyed by (this stream's key, id). Does not advance *this.
  [[nodiscard]] CounterRng split(std::uint64_t id) const noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  /// Standard normal deviate (ziggurat).
  double normal();

  /// +1.0 or -1.0 with equal probability.
  double rademacher() noexcept { return ((*this)() >> 63) != 0U ? 1.0 : -1.0; }

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace slcomm
