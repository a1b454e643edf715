#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "anslab/distribution.hpp"
#include "anslab/spread.hpp"

namespace anslab {

// Frozen encode/decode tables.
//
//   encode step for (s, x):  k = k_s(x) = floor(lg(x / L_s)), emit the k low
//   bits of x, jump to C(s, floor(x / 2^k)).
//   decode step at x:        (s, y) = D(x), read k(y) = R - floor(lg y) bits
//   b, reconstruct the previous state 2^k * y + b.
//
// Immutable after construction; safe to share across threads.
class CodingTables {
 public:
  CodingTables() = default;
  static CodingTables build(const SymbolDistribution& dist, const SymbolSpread& spread);

  /// In-place rebuild that reuses buffers (hot path of the spread search).
  void rebuild(const SymbolDistribution& dist, const SymbolSpread& spread);

  std::uint32_t table_exponent() const { return R_; }
  std::uint32_t state_count() const { return L_; }
  std::size_t alphabet_size() const { return n_; }

  unsigned k_bits(std::size_t s, std::uint32_t x) const {
    return k_[s * L_ + (x - L_)];
  }
  std::uint32_t next_state(std::size_t s, std::uint32_t x) const {
    return next_[s * L_ + (x - L_)];
  }

  /// C(s, y) for y in [L_s, 2 L_s - 1]: the (y - L_s)-th state of the
  /// ascending set of s.
  std::uint32_t coding_fn(std::size_t s, std::uint32_t y) const {
    return set_states_[set_offset_[s] + (y - counts_[s])];
  }

  /// D(x) = (symbol, y).
  std::pair<std::uint32_t, std::uint32_t> decode_at(std::uint32_t x) const {
    return {dsym_[x - L_], dq_[x - L_]};
  }

  /// k(y) = R - floor(lg y): bits to read when D returned quotient y.
  unsigned read_bits(std::uint32_t y) const;

  std::uint32_t symbol_count(std::size_t s) const { return counts_[s]; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

 private:
  std::uint32_t R_ = 0;
  std::uint32_t L_ = 0;
  std::size_t n_ = 0;
  std::vector<std::uint32_t> counts_;      // L_s
  std::vector<std::uint32_t> set_offset_;  // prefix sums of counts_
  std::vector<std::uint32_t> set_states_;  // ascending states, grouped by symbol
  std::vector<std::uint8_t> k_;            // n x L
  std::vector<std::uint32_t> next_;        // n x L
  std::vector<std::uint32_t> dsym_;        // L
  std::vector<std::uint32_t> dq_;          // L
};

/// floor(log2(v)) for v >= 1.
inline unsigned floor_log2(std::uint32_t v) {
  return 31u - static_cast<unsigned>(__builtin_clz(v));
}

}  // namespace anslab
