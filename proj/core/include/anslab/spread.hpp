#pragma once

#include <cstdint>
#include <vector>

#include "anslab/distribution.hpp"

namespace anslab {

/// Symbol spread: the assignment of every state x in I = {L, ..., 2L-1} to a
/// symbol. Stored as assignment[x - L] = symbol index; the per-symbol state
/// sets derived from it are automatically ascending.
class SymbolSpread {
 public:
  SymbolSpread() = default;
  SymbolSpread(std::uint32_t R, std::vector<std::uint32_t> assignment);

  static SymbolSpread from_sets(std::uint32_t R,
                                const std::vector<std::vector<std::uint32_t>>& sets);

  std::uint32_t table_exponent() const { return R_; }
  std::uint32_t state_count() const { return L_; }

  std::uint32_t symbol_of(std::uint32_t x) const { return assignment_[x - L_]; }
  void set_symbol(std::uint32_t x, std::uint32_t s) { assignment_[x - L_] = s; }

  const std::vector<std::uint32_t>& assignment() const { return assignment_; }

  /// L_s per symbol (n = alphabet size).
  std::vector<std::uint32_t> counts(std::size_t n) const;

  /// Ascending state set per symbol.
  std::vector<std::vector<std::uint32_t>> symbol_sets(std::size_t n) const;

  bool operator==(const SymbolSpread&) const = default;

 private:
  std::uint32_t R_ = 0;
  std::uint32_t L_ = 0;
  std::vector<std::uint32_t> assignment_;
};

/// Throws std::invalid_argument unless |set_s| = L_s for every symbol.
void validate_spread(const SymbolDistribution& dist, const SymbolSpread& spread);

}  // namespace anslab
