#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anslab/coding.hpp"
#include "anslab/distribution.hpp"
#include "anslab/rational.hpp"

namespace anslab::markov {

enum class Arithmetic { exact, floating };

/// The spread's state chain has no unique stationary solution (the linear
/// system is rank-deficient). First-class outcome: the optimizer counts it
/// as a rejection, the CLI maps it to its own exit code.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear system M X = B for the stationary distribution: column = source
// state (mod L), row = destination (mod L), entries accumulate p_s per
// transition, main diagonal -1, last row overwritten with ones, B = e_last.
class TransitionSystem {
 public:
  std::uint32_t dim() const { return dim_; }

  /// M entry as an exact rational (exact build only).
  Rational entry(std::uint32_t row, std::uint32_t col) const;
  double entry_d(std::uint32_t row, std::uint32_t col) const {
    return mf_[static_cast<std::size_t>(row) * dim_ + col];
  }
  Rational rhs(std::uint32_t row) const {
    return row + 1 == dim_ ? Rational(1) : Rational(0);
  }

  bool exact_built() const { return exact_built_; }

  const std::vector<double>& matrix_d() const { return mf_; }
  /// Integer-scaled exact matrix (row-major) and its common denominator.
  const std::vector<BigInt>& scaled_matrix() const { return mz_; }
  const BigInt& denominator() const { return denom_; }

 private:
  friend TransitionSystem build_transition_system(const CodingTables&,
                                                  const SymbolDistribution&,
                                                  Arithmetic);

  std::uint32_t dim_ = 0;
  std::vector<double> mf_;        // row-major, always built
  bool exact_built_ = false;
  std::vector<BigInt> mz_;        // row-major, scaled by denom_
  BigInt denom_;                  // common denominator of the p_s
};

/// Assembles the system from the encode table; the `arithmetic` argument
/// controls whether the exact integer-scaled form is materialized alongside
/// the doubles (the search hot path skips it).
TransitionSystem build_transition_system(const CodingTables& tables,
                                         const SymbolDistribution& dist,
                                         Arithmetic arithmetic = Arithmetic::exact);

struct EquilibriumDistribution {
  Arithmetic mode = Arithmetic::floating;
  std::uint32_t first_state = 0;          // = L; probs[i] is p_{L+i}
  std::vector<double> probs;              // always filled
  std::vector<Rational> probs_exact;      // exact mode only

  double prob(std::uint32_t x) const { return probs[x - first_state]; }
  const Rational& prob_exact(std::uint32_t x) const {
    return probs_exact[x - first_state];
  }
};

/// Solves M X = B. Exact mode runs fraction-free (Bareiss) elimination over
/// big integers (with an __int128 fast path for small scaled systems) and is
/// intended for L <= 256; floating mode runs partially pivoted LU with
/// singularity threshold |pivot| < 1e-12. Throws SingularSystemError.
EquilibriumDistribution solve_equilibrium(const TransitionSystem& sys, Arithmetic mode,
                                          std::uint32_t first_state);

/// Convenience overload: builds the system and solves it.
EquilibriumDistribution solve_equilibrium(const CodingTables& tables,
                                          const SymbolDistribution& dist,
                                          Arithmetic mode);

struct RedundancyReport {
  Arithmetic mode = Arithmetic::floating;
  std::vector<double> kappa_per_symbol;        // kappa(s)
  std::vector<Rational> kappa_per_symbol_exact;
  double kappa = 0;                            // avg bits/symbol
  Rational kappa_exact;                        // exact mode only
  double entropy = 0;                          // H(S)
  double delta_h = 0;                          // kappa - H(S)
};

/// kappa(s) = sum_x k_s(x) p_x, kappa = sum_s p_s kappa(s), dH = kappa - H.
RedundancyReport redundancy(const EquilibriumDistribution& eq, const CodingTables& tables,
                            const SymbolDistribution& dist);

/// Monte-Carlo oracle: empirical state-visit frequencies from driving the
/// encode table with an i.i.d. symbol stream. Starts at x = L, discards a
/// 1000-step burn-in, then counts `steps` post-transition states.
/// Deterministic given (seed, steps); requires steps >= 10^4.
EquilibriumDistribution simulate_empirical(const CodingTables& tables,
                                           const SymbolDistribution& dist,
                                           std::uint64_t steps, std::uint64_t seed);

}  // namespace anslab::markov
