#pragma once

#include <cstdint>
#include <vector>

#include "anslab/rational.hpp"

namespace anslab::markov::detail {

// Fraction-free (Bareiss) elimination with partial (first-nonzero) pivoting
// over exact integers, then rational back-substitution. A is the augmented
// n x (n+1) system, row-major. Returns false when the system is singular.

/// int64 input; forward pass runs in __int128 with overflow checks and falls
/// back to the big-integer path when a product would not fit.
bool solve_augmented_i64(std::size_t n, const std::int64_t* a, Rational* x);

/// Big-integer path; `a` is consumed as scratch.
bool solve_augmented_mpz(std::size_t n, std::vector<BigInt>& a, Rational* x);

}  // namespace anslab::markov::detail
