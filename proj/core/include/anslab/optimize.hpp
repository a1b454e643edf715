#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "anslab/distribution.hpp"
#include "anslab/markov.hpp"
#include "anslab/spread.hpp"

namespace anslab::opt {

class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InitSpread { random, tuned, rank, explicit_spread };
enum class Objective { minimize, maximize };

struct SearchConfig {
  double threshold = 0.0;             // T: stop once dH beats it (strictly)
  std::uint64_t max_iterations = 0;   // theta: total x-steps across sweeps
  std::uint64_t seed = 0;
  InitSpread init = InitSpread::random;
  Objective objective = Objective::minimize;
  std::optional<SymbolSpread> initial;  // for InitSpread::explicit_spread
  // arithmetic for the final report (the search itself evaluates in floating
  // point; exact reports are meant for small L)
  markov::Arithmetic report_arithmetic = markov::Arithmetic::floating;
};

struct GoodSwap {
  std::uint64_t iteration = 0;
  std::uint32_t state_a = 0;
  std::uint32_t state_b = 0;
  double delta_h = 0;  // after the swap
};

struct SearchTrace {
  std::vector<GoodSwap> good_swaps;   // accepted, dH strictly monotone
  std::uint64_t iterations = 0;       // x-steps consumed
  std::uint64_t swaps_attempted = 0;  // candidate evaluations
  std::uint64_t singular_rejections = 0;
  double wall_seconds = 0;
  bool reached_threshold = false;
  bool final_singular = false;  // no non-singular spread was ever found
  double initial_delta_h = 0;
  SymbolSpread final_spread;
  markov::RedundancyReport report;    // for the final spread
};

/// Exchanges the symbols of states x and y and re-canonicalizes (each
/// per-symbol set stays ascending, which realizes the cascade repair).
/// Throws std::invalid_argument when both states carry the same symbol.
SymbolSpread swap_states(const SymbolSpread& spread, std::uint32_t x, std::uint32_t y);

/// Uniformly random valid spread for the distribution's counts.
SymbolSpread random_spread(const SymbolDistribution& dist, std::uint64_t seed);

// Probabilistic swap search: sweeps x over I, draws a partner y per state,
// evaluates the swapped coder's equilibrium dH and accepts strict
// improvements. Singular candidates count as rejections. Deterministic for
// a given seed.
SearchTrace swap_search(const SymbolDistribution& dist, const SearchConfig& cfg);

struct SpreadHistogram {
  BigInt total;                   // multinomial spread count
  std::uint64_t evaluated = 0;
  std::uint64_t failures = 0;     // singular systems
  Rational min_kappa, max_kappa;
  std::uint64_t min_count = 0, max_count = 0;
  SymbolSpread min_spread, max_spread;      // lexicographically first each
  std::vector<Rational> edges;              // bucket edges, ascending
  // counts for (min, e0], (e0, e1], ..., (e_last, max); exact-min and
  // exact-max spreads are kept out of the end buckets
  std::vector<std::uint64_t> bucket_counts;
};

/// Enumerates every partition of I with the distribution's counts
/// (lexicographic over assignment strings), solves each equilibrium and
/// histograms kappa. Throws CapExceededError if the multinomial exceeds cap.
SpreadHistogram exhaustive_spreads(const SymbolDistribution& dist,
                                   std::uint64_t cap = 1000000,
                                   markov::Arithmetic mode = markov::Arithmetic::exact,
                                   std::vector<Rational> edges = {},
                                   unsigned threads = 0);

enum class QuantizedSearchMode { best_fit, exhaustive };

/// Quantization-aware search: best_fit runs the quantizer then one swap
/// search; exhaustive tries every feasible L_s in {alpha_s, alpha_s + 1}
/// (tail symbols pinned to 1, vectors with sum != L rejected) and returns
/// the best. Every candidate search uses the same config, so the best-fit
/// vector's trace is identical in both modes.
std::pair<SymbolDistribution, SearchTrace> quantized_search(
    const std::vector<Rational>& probs, std::uint32_t R, QuantizedSearchMode mode,
    const SearchConfig& cfg, std::vector<std::string> symbols = {});

}  // namespace anslab::opt
