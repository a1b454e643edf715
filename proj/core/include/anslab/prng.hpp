#pragma once

#include <cstdint>

namespace anslab {

// splitmix64 (Steele/Lea/Flood constants). Traces produced by the spread
// search are portable across implementations as long as this generator and
// its constants stay fixed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform state draw from I = {L, ..., 2L-1}; exact for power-of-two L.
  std::uint32_t next_state(std::uint32_t L) {
    return L + static_cast<std::uint32_t>(next() & (L - 1));
  }

  /// Uniform in [0, n); modulo draw (bias < 2^-32 for n < 2^32).
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Derives an independent stream (used for per-task seeds in fan-outs).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0xA5A5A5A55A5A5A5AULL + stream * 0x9E3779B97F4A7C15ULL));
    return g.next();
  }

 private:
  std::uint64_t state_;
};

}  // namespace anslab
