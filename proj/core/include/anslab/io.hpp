#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "anslab/distribution.hpp"
#include "anslab/spread.hpp"

namespace anslab::io {

// Distribution file: one `symbol<TAB>value` line per symbol; values are
// probabilities ("3/16", "0.1875") or raw occurrence counts (integers,
// normalized). Blank lines and lines starting with '#' are skipped.
struct DistFile {
  std::vector<std::string> symbols;
  std::vector<Rational> values;
  bool counts = false;  // true when every value was an integer
};

DistFile read_dist_file(std::istream& in);
DistFile read_dist_file(const std::string& path);

/// Normalized probabilities from a dist file (counts get divided by total).
std::vector<Rational> dist_file_probs(const DistFile& file);

void write_dist_file(std::ostream& out, const SymbolDistribution& dist);

// Spread file: one `state<TAB>symbol` line per state, states ascending.

/// Raw spread lines (states ascending over I, symbol names as written);
/// lets callers infer R and the per-symbol counts before a distribution
/// exists.
struct SpreadFileRaw {
  std::uint32_t R = 0;
  std::vector<std::string> symbols;  // one per state, x = L .. 2L-1
};
SpreadFileRaw read_spread_file_raw(std::istream& in);
SpreadFileRaw read_spread_file_raw(const std::string& path);

SymbolSpread read_spread_file(std::istream& in, const SymbolDistribution& dist);
SymbolSpread read_spread_file(const std::string& path, const SymbolDistribution& dist);
void write_spread_file(std::ostream& out, const SymbolSpread& spread,
                       const SymbolDistribution& dist);
void write_spread_file(const std::string& path, const SymbolSpread& spread,
                       const SymbolDistribution& dist);

/// SHA-256 of a byte buffer / file, lowercase hex.
std::string sha256_hex(const void* data, std::size_t size);
std::string sha256_file_hex(const std::string& path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace anslab::io
