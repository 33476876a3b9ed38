#pragma once

// Counter-based random streams. Every (run, iteration, SU) triple gets its own
// generator derived from the master seed, so a run replays bit-identically no
// matter how the work is scheduled across threads.

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace imitate {

namespace detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Derive an independent seed from a parent seed and a list of counters.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t s = detail::splitmix_finalize(seed + detail::kGolden);
  for (std::uint64_t k : keys) {
    s = detail::splitmix_finalize(s ^ detail::splitmix_finalize(k + detail::kGolden));
  }
  return s;
}

/// SplitMix64. Small state, cheap to construct per substream, and satisfies
/// UniformRandomBitGenerator so it plugs into <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += detail::kGolden;
    return detail::splitmix_finalize(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  constexpr std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire's nearly-divisionless method.
    __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<__uint128_t>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace imitate
