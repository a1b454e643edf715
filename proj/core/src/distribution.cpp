#include "anslab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace anslab {

namespace {

void check_probs(std::vector<Rational>& probs) {
  if (probs.size() < 2)
    throw std::invalid_argument("alphabet needs at least 2 symbols");
  Rational sum = 0;
  for (auto& p : probs) {
    p.canonicalize();
    if (p <= 0) throw std::invalid_argument("symbol probabilities must be positive");
    sum += p;
  }
  if (sum != 1) throw std::invalid_argument("probabilities must sum to 1, got " + rational_string(sum));
}

}  // namespace

SymbolDistribution::SymbolDistribution(std::vector<std::string> symbols,
                                       std::vector<Rational> probs, std::uint32_t R,
                                       std::vector<std::uint32_t> counts)
    : symbols_(std::move(symbols)), probs_(std::move(probs)), R_(R), counts_(std::move(counts)) {
  if (R_ < 1 || R_ > 30) throw std::invalid_argument("R out of range [1,30]");
  L_ = 1u << R_;
  check_probs(probs_);
  if (symbols_.empty()) symbols_ = default_symbol_names(probs_.size());
  if (symbols_.size() != probs_.size() || counts_.size() != probs_.size())
    throw std::invalid_argument("symbols/probs/counts size mismatch");
  std::uint64_t total = 0;
  for (auto c : counts_) {
    if (c == 0) throw std::invalid_argument("every symbol needs at least one state");
    total += c;
  }
  if (total != L_) throw std::invalid_argument("state counts must sum to L = 2^R");
  probs_d_.reserve(probs_.size());
  for (const auto& p : probs_) probs_d_.push_back(to_double(p));
}

double SymbolDistribution::entropy_bits() const {
  double h = 0;
  for (double p : probs_d_) h += p * std::log2(1.0 / p);
  return h;
}

bool SymbolDistribution::dyadic() const {
  for (std::size_t s = 0; s < probs_.size(); ++s) {
    const auto& p = probs_[s];
    if (p.get_num() != 1) return false;
    const BigInt& den = p.get_den();
    // power of two denominator and L_s = L * p_s
    if (mpz_popcount(den.get_mpz_t()) != 1) return false;
    Rational q(counts_[s], L_);
    q.canonicalize();
    if (q != p) return false;
  }
  return true;
}

std::size_t SymbolDistribution::index_of(const std::string& symbol) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), symbol);
  if (it == symbols_.end()) throw std::invalid_argument("unknown symbol: " + symbol);
  return static_cast<std::size_t>(it - symbols_.begin());
}

std::vector<std::string> default_symbol_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back("s" + std::to_string(i + 1));
  return names;
}

SymbolDistribution quantize(std::vector<Rational> probs, std::uint32_t R,
                            std::vector<std::string> symbols) {
  check_probs(probs);
  if (R < 1 || R > 30) throw std::invalid_argument("R out of range [1,30]");
  const std::uint32_t L = 1u << R;
  const std::size_t n = probs.size();
  if (n > L) throw std::invalid_argument("alphabet larger than the state count");

  std::vector<std::uint32_t> counts(n);
  std::vector<Rational> frac(n);
  std::vector<bool> tail(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    Rational scaled = probs[s] * L;
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
    if (fl < 1) {
      tail[s] = true;  // p_s * L < 1: pinned to a single state
      counts[s] = 1;
      frac[s] = 0;
    } else {
      counts[s] = static_cast<std::uint32_t>(fl.get_ui());
      frac[s] = scaled - Rational(fl);
    }
  }

  std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});

  // grant +1 in descending fractional-part order (ties: higher p_s, then
  // alphabet order)
  auto better_grant = [&](std::size_t a, std::size_t b) {
    if (frac[a] != frac[b]) return frac[a] > frac[b];
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return a < b;
  };
  while (total < L) {
    std::size_t pick = n;
    for (std::size_t s = 0; s < n; ++s) {
      if (tail[s]) continue;
      if (pick == n || better_grant(s, pick)) pick = s;
    }
    if (pick == n) throw std::invalid_argument("cannot distribute states");
    ++counts[pick];
    frac[pick] = -1;
    ++total;
  }
  // the tail rule can overshoot; remove states in ascending fractional-part
  // order from non-tail symbols that still have >= 2
  auto better_take = [&](std::size_t a, std::size_t b) {
    if (frac[a] != frac[b]) return frac[a] < frac[b];
    if (probs[a] != probs[b]) return probs[a] < probs[b];
    return a > b;
  };
  while (total > L) {
    std::size_t pick = n;
    for (std::size_t s = 0; s < n; ++s) {
      if (tail[s] || counts[s] < 2) continue;
      if (pick == n || better_take(s, pick)) pick = s;
    }
    if (pick == n) throw std::invalid_argument("cannot shrink counts to L");
    --counts[pick];
    frac[pick] = 2;
    --total;
  }

  return SymbolDistribution(std::move(symbols), std::move(probs), R, std::move(counts));
}

SymbolDistribution distribution_from_counts(std::vector<std::uint32_t> counts, std::uint32_t R,
                                            std::vector<std::string> symbols) {
  if (R < 1 || R > 30) throw std::invalid_argument("R out of range [1,30]");
  const std::uint32_t L = 1u << R;
  std::vector<Rational> probs;
  probs.reserve(counts.size());
  for (auto c : counts) probs.emplace_back(c, L);
  for (auto& p : probs) p.canonicalize();
  return SymbolDistribution(std::move(symbols), std::move(probs), R, std::move(counts));
}

SymbolDistribution quantize(const std::vector<Rational>& probs_or_counts, std::uint32_t R,
                            QuantizeMode mode, std::vector<std::string> symbols) {
  if (mode == QuantizeMode::best_fit)
    return quantize(probs_or_counts, R, std::move(symbols));
  std::vector<std::uint32_t> counts;
  counts.reserve(probs_or_counts.size());
  for (const auto& v : probs_or_counts) {
    if (v.get_den() != 1 || v <= 0 || v.get_num() > 1u << R)
      throw std::invalid_argument("given_counts mode expects positive integer counts");
    counts.push_back(static_cast<std::uint32_t>(v.get_num().get_ui()));
  }
  return distribution_from_counts(std::move(counts), R, std::move(symbols));
}

std::vector<Rational> rationalize_probs(const std::vector<double>& probs) {
  double sum = 0;
  for (double p : probs) {
    if (!(p > 0)) throw std::invalid_argument("symbol probabilities must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("probabilities must sum to 1 within 1e-12");
  std::vector<Rational> out;
  out.reserve(probs.size());
  Rational total = 0;
  for (double p : probs) {
    out.emplace_back(p);  // exact binary expansion
    total += out.back();
  }
  for (auto& q : out) {
    q /= total;  // normalize exactly to sum 1
    q.canonicalize();
  }
  return out;
}

}  // namespace anslab
