#include "anslab/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anslab/coding.hpp"

namespace anslab::tuning {

StateIntervalPartition partition_intervals(const SymbolDistribution& dist,
                                           std::uint32_t symbol) {
  if (symbol >= dist.alphabet_size()) throw std::invalid_argument("symbol index out of range");
  const std::uint32_t L = dist.state_count();
  const std::uint32_t Ls = dist.count(symbol);
  const unsigned base = floor_log2(Ls);

  StateIntervalPartition part;
  part.symbol = symbol;
  part.intervals.resize(Ls);

  std::uint32_t x = L;
  while (x < 2 * L) {
    unsigned k = floor_log2(x) - base;
    if ((x >> k) < Ls) --k;
    const std::uint32_t q = x >> k;
    const std::uint32_t last = std::min(((q + 1) << k) - 1, 2 * L - 1);
    part.intervals[q - Ls] = StateInterval{x, last, q, k};
    x = last + 1;
  }
  return part;
}

double preferred_state(double p_s, std::uint32_t r, std::uint32_t alpha) {
  if (r < 2) throw std::invalid_argument("interval must start at r >= 2");
  if (alpha < 1) throw std::invalid_argument("interval must be non-empty");
  return 1.0 / (p_s * std::log((static_cast<double>(r) + alpha - 1) / (r - 1.0)));
}

PreferredPositions preferred_positions(const SymbolDistribution& dist) {
  const std::uint32_t L = dist.state_count();
  const std::size_t n = dist.alphabet_size();

  PreferredPositions prefs;
  prefs.L = L;
  prefs.raw.resize(n);
  prefs.clamped.resize(n);
  prefs.rounded.resize(n);

  for (std::size_t s = 0; s < n; ++s) {
    const auto part = partition_intervals(dist, static_cast<std::uint32_t>(s));
    const double p = dist.prob_d(s);
    for (const auto& iv : part.intervals) {
      const double y = preferred_state(p, iv.first, iv.width());
      prefs.raw[s].push_back(y);

      double fixed = y;
      if (fixed < L) {
        // a position below I carries no rank information; retry with the
        // interval shifted one state up, which lands the value back in I
        fixed = preferred_state(p, iv.first + 1, iv.width());
      }
      fixed = std::clamp(fixed, static_cast<double>(L), 2.0 * L - 1.0);
      prefs.clamped[s].push_back(fixed);

      const double rounded = std::floor(y + 0.5);  // round half up
      const double in_range =
          std::clamp(rounded, static_cast<double>(L), 2.0 * L - 1.0);
      prefs.rounded[s].push_back(static_cast<std::uint32_t>(in_range));
    }
    std::sort(prefs.clamped[s].begin(), prefs.clamped[s].end());
  }
  return prefs;
}

SymbolSpread tune_spread(const SymbolDistribution& dist) {
  const std::uint32_t L = dist.state_count();
  const std::size_t n = dist.alphabet_size();
  const auto prefs = preferred_positions(dist);

  // probability-descending claim priority (ties: alphabet order)
  std::vector<std::size_t> order(n);
  for (std::size_t s = 0; s < n; ++s) order[s] = s;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dist.prob(a) != dist.prob(b)) return dist.prob(a) > dist.prob(b);
    return a < b;
  });

  constexpr std::uint32_t kFree = UINT32_MAX;
  std::vector<std::uint32_t> owner(L, kFree);
  for (std::size_t s : order) {
    for (std::uint32_t claim : prefs.rounded[s]) {
      if (owner[claim - L] == kFree) {
        owner[claim - L] = static_cast<std::uint32_t>(s);
        continue;
      }
      // nearest free state; distance ties go to the higher state
      std::uint32_t best = 0;
      std::uint32_t best_dist = UINT32_MAX;
      for (std::uint32_t x = L; x < 2 * L; ++x) {
        if (owner[x - L] != kFree) continue;
        const std::uint32_t d = x > claim ? x - claim : claim - x;
        if (d < best_dist || (d == best_dist && x > best)) {
          best_dist = d;
          best = x;
        }
      }
      if (best_dist == UINT32_MAX) throw std::logic_error("no free state left");
      owner[best - L] = static_cast<std::uint32_t>(s);
    }
  }
  return SymbolSpread(dist.table_exponent(), std::move(owner));
}

SymbolSpread rank_match_spread(const SymbolDistribution& dist) {
  const std::uint32_t L = dist.state_count();
  const std::size_t n = dist.alphabet_size();
  const auto prefs = preferred_positions(dist);

  struct Item {
    double y;
    std::uint32_t symbol;
  };
  std::vector<Item> items;
  items.reserve(L);
  for (std::size_t s = 0; s < n; ++s)
    for (double y : prefs.clamped[s]) items.push_back({y, static_cast<std::uint32_t>(s)});

  std::sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
    if (a.y != b.y) return a.y < b.y;
    // ties: lower-probability symbol first, then alphabet order
    if (dist.prob(a.symbol) != dist.prob(b.symbol))
      return dist.prob(a.symbol) < dist.prob(b.symbol);
    return a.symbol < b.symbol;
  });

  std::vector<std::uint32_t> assignment(L);
  for (std::uint32_t i = 0; i < L; ++i) assignment[i] = items[i].symbol;
  return SymbolSpread(dist.table_exponent(), std::move(assignment));
}

double spread_distance(const SymbolSpread& spread, const PreferredPositions& prefs) {
  const std::size_t n = prefs.clamped.size();
  const auto sets = spread.symbol_sets(n);
  double d = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (sets[s].size() != prefs.clamped[s].size())
      throw std::invalid_argument("spread and preferred positions disagree on L_s");
    for (std::size_t j = 0; j < sets[s].size(); ++j)
      d += std::abs(static_cast<double>(sets[s][j]) - prefs.clamped[s][j]);
  }
  return d;
}

}  // namespace anslab::tuning
