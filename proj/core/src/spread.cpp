#include "anslab/spread.hpp"

#include <stdexcept>

namespace anslab {

SymbolSpread::SymbolSpread(std::uint32_t R, std::vector<std::uint32_t> assignment)
    : R_(R), L_(1u << R), assignment_(std::move(assignment)) {
  if (R_ < 1 || R_ > 30) throw std::invalid_argument("R out of range [1,30]");
  if (assignment_.size() != L_)
    throw std::invalid_argument("spread must assign every state in I");
}

SymbolSpread SymbolSpread::from_sets(std::uint32_t R,
                                     const std::vector<std::vector<std::uint32_t>>& sets) {
  const std::uint32_t L = 1u << R;
  std::vector<std::uint32_t> assignment(L, UINT32_MAX);
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (std::uint32_t x : sets[s]) {
      if (x < L || x >= 2 * L) throw std::invalid_argument("state outside I");
      if (assignment[x - L] != UINT32_MAX)
        throw std::invalid_argument("state assigned twice");
      assignment[x - L] = static_cast<std::uint32_t>(s);
    }
  }
  for (auto a : assignment)
    if (a == UINT32_MAX) throw std::invalid_argument("sets do not cover I");
  return SymbolSpread(R, std::move(assignment));
}

std::vector<std::uint32_t> SymbolSpread::counts(std::size_t n) const {
  std::vector<std::uint32_t> c(n, 0);
  for (auto s : assignment_) {
    if (s >= n) throw std::invalid_argument("assignment references unknown symbol");
    ++c[s];
  }
  return c;
}

std::vector<std::vector<std::uint32_t>> SymbolSpread::symbol_sets(std::size_t n) const {
  std::vector<std::vector<std::uint32_t>> sets(n);
  for (std::uint32_t i = 0; i < L_; ++i) {
    const std::uint32_t s = assignment_[i];
    if (s >= n) throw std::invalid_argument("assignment references unknown symbol");
    sets[s].push_back(L_ + i);  // ascending by construction
  }
  return sets;
}

void validate_spread(const SymbolDistribution& dist, const SymbolSpread& spread) {
  if (spread.table_exponent() != dist.table_exponent())
    throw std::invalid_argument("spread and distribution use different R");
  const auto counts = spread.counts(dist.alphabet_size());
  for (std::size_t s = 0; s < counts.size(); ++s)
    if (counts[s] != dist.count(s))
      throw std::invalid_argument("spread has " + std::to_string(counts[s]) + " states for " +
                                  dist.symbols()[s] + ", expected " +
                                  std::to_string(dist.count(s)));
}

}  // namespace anslab
