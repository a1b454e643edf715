#pragma once

#include <cstdint>
#include <vector>

#include "anslab/distribution.hpp"
#include "anslab/spread.hpp"

namespace anslab::tuning {

/// One maximal run of states sharing (k_s(x), floor(x / 2^k)).
struct StateInterval {
  std::uint32_t first = 0;     // r
  std::uint32_t last = 0;      // r + alpha - 1
  std::uint32_t quotient = 0;  // y = floor(x / 2^k), constant on the interval
  unsigned bits = 0;           // k; alpha = 2^k

  std::uint32_t width() const { return last - first + 1; }
};

/// The L_s intervals of symbol s, ordered by quotient y = L_s .. 2 L_s - 1.
struct StateIntervalPartition {
  std::uint32_t symbol = 0;
  std::vector<StateInterval> intervals;
};

StateIntervalPartition partition_intervals(const SymbolDistribution& dist,
                                           std::uint32_t symbol);

/// Preferred destination state for one interval [r, r+alpha-1]:
/// y = 1 / (p_s * ln((r + alpha - 1) / (r - 1))). Requires r >= 2.
double preferred_state(double p_s, std::uint32_t r, std::uint32_t alpha);

// Per symbol (quotient order): raw preferred reals, the in-range reals used
// for rank matching, and the rounded integer claims used by spread tuning.
// A raw value below L retries with the interval shifted one state up, then
// everything is clamped into [L, 2L-1]; clamped lists are sorted ascending.
struct PreferredPositions {
  std::uint32_t L = 0;
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> clamped;
  std::vector<std::vector<std::uint32_t>> rounded;  // round-half-up of raw, in I
};

PreferredPositions preferred_positions(const SymbolDistribution& dist);

/// Collision-resolving spread tuning: symbols claim their rounded preferred
/// states in probability-descending priority; displaced claims move to the
/// nearest free state (distance ties go to the higher state).
SymbolSpread tune_spread(const SymbolDistribution& dist);

/// Rank matching: all clamped preferred positions sorted ascending (ties:
/// lower-probability symbol first, then alphabet order); the i-th state of I
/// takes the i-th label.
SymbolSpread rank_match_spread(const SymbolDistribution& dist);

/// d = sum_s sum_j |x_j - y_j| with the j-th ascending state of each symbol
/// matched to its j-th ascending clamped preferred position.
double spread_distance(const SymbolSpread& spread, const PreferredPositions& prefs);

}  // namespace anslab::tuning
