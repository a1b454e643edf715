#include "anslab/coding.hpp"

#include <stdexcept>

namespace anslab {

CodingTables CodingTables::build(const SymbolDistribution& dist, const SymbolSpread& spread) {
  CodingTables t;
  t.rebuild(dist, spread);
  return t;
}

void CodingTables::rebuild(const SymbolDistribution& dist, const SymbolSpread& spread) {
  validate_spread(dist, spread);
  R_ = dist.table_exponent();
  L_ = dist.state_count();
  n_ = dist.alphabet_size();
  counts_ = dist.counts();

  set_offset_.assign(n_ + 1, 0);
  for (std::size_t s = 0; s < n_; ++s) set_offset_[s + 1] = set_offset_[s] + counts_[s];

  set_states_.assign(L_, 0);
  dsym_.assign(L_, 0);
  dq_.assign(L_, 0);
  {
    std::vector<std::uint32_t> fill(n_, 0);
    for (std::uint32_t i = 0; i < L_; ++i) {
      const std::uint32_t s = spread.symbol_of(L_ + i);
      const std::uint32_t j = fill[s]++;
      set_states_[set_offset_[s] + j] = L_ + i;
      dsym_[i] = s;
      dq_[i] = counts_[s] + j;  // y for D(x); D(C(s,y)) == (s,y)
    }
  }

  k_.assign(n_ * L_, 0);
  next_.assign(n_ * L_, 0);
  for (std::size_t s = 0; s < n_; ++s) {
    const std::uint32_t Ls = counts_[s];
    const unsigned base = floor_log2(Ls);
    for (std::uint32_t x = L_; x < 2 * L_; ++x) {
      unsigned k = floor_log2(x) - base;
      if ((x >> k) < Ls) --k;  // k = floor(lg(x / L_s))
      k_[s * L_ + (x - L_)] = static_cast<std::uint8_t>(k);
      const std::uint32_t y = x >> k;
      next_[s * L_ + (x - L_)] = set_states_[set_offset_[s] + (y - Ls)];
    }
  }
}

unsigned CodingTables::read_bits(std::uint32_t y) const {
  return R_ - floor_log2(y);
}

}  // namespace anslab
