#pragma once

#include <cstdint>

namespace ohx {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw k of stream s under seed is
///
///   key  = mix64(seed + s * 0xD1B54A32D192ED03)
///   x_k  = mix64(key + (k + 1) * 0x9E3779B97F4A7C15)
///
/// Doubles are the top 53 bits of x_k scaled by 2^-53, so every draw lies in
/// [0, 1). The sequence depends only on (seed, stream, k) and is trivially
/// reproducible in any language with 64-bit unsigned wraparound.
class CounterRng {
public:
  explicit constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix64(seed + stream * 0xD1B54A32D192ED03ULL)) {}

  constexpr std::uint64_t at(std::uint64_t k) const noexcept {
    return mix64(key_ + (k + 1) * 0x9E3779B97F4A7C15ULL);
  }

  constexpr std::uint64_t next_u64() noexcept { return at(counter_++); }

  constexpr double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ohx
