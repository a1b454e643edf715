#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anslab/rational.hpp"

namespace anslab {

enum class QuantizeMode { best_fit, given_counts };

/// Symbol statistics plus their quantization onto L = 2^R states: exact
/// probabilities p_s and integer state counts L_s with sum L_s = L.
class SymbolDistribution {
 public:
  SymbolDistribution(std::vector<std::string> symbols, std::vector<Rational> probs,
                     std::uint32_t R, std::vector<std::uint32_t> counts);

  std::uint32_t table_exponent() const { return R_; }  // R
  std::uint32_t state_count() const { return L_; }     // L = 2^R
  std::size_t alphabet_size() const { return probs_.size(); }

  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<Rational>& probs() const { return probs_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

  const Rational& prob(std::size_t s) const { return probs_[s]; }
  double prob_d(std::size_t s) const { return probs_d_[s]; }
  std::uint32_t count(std::size_t s) const { return counts_[s]; }

  /// H(S) = sum p_s log2(1/p_s), in bits/symbol.
  double entropy_bits() const;

  /// True when every p_s is a natural power of 1/2 and L_s = L * p_s.
  bool dyadic() const;

  /// Index lookup by symbol name; throws if unknown.
  std::size_t index_of(const std::string& symbol) const;

 private:
  std::vector<std::string> symbols_;
  std::vector<Rational> probs_;
  std::vector<double> probs_d_;
  std::uint32_t R_ = 0;
  std::uint32_t L_ = 0;
  std::vector<std::uint32_t> counts_;
};

std::vector<std::string> default_symbol_names(std::size_t n);

/// Largest-remainder quantizer with the rare-symbol tail rule: p_s*L < 1
/// forces L_s = 1; remaining states go to the largest fractional parts
/// (ties: higher p_s, then alphabet order). When the tail overshoots L the
/// mirror rule removes states in ascending fractional-part order.
SymbolDistribution quantize(std::vector<Rational> probs, std::uint32_t R,
                            std::vector<std::string> symbols = {});

/// given_counts mode: counts are the L_s themselves (must sum to L); the
/// coding probabilities become q_s = L_s / L exactly.
SymbolDistribution distribution_from_counts(std::vector<std::uint32_t> counts, std::uint32_t R,
                                            std::vector<std::string> symbols = {});

/// Spec-shaped entry point dispatching on mode.
SymbolDistribution quantize(const std::vector<Rational>& probs_or_counts, std::uint32_t R,
                            QuantizeMode mode, std::vector<std::string> symbols = {});

/// Exact rationalization of double probabilities (normalized to sum 1;
/// rejects if the input sum is off by more than 1e-12).
std::vector<Rational> rationalize_probs(const std::vector<double>& probs);

}  // namespace anslab
