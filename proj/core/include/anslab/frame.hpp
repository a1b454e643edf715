#pragma once

#include <cstdint>
#include <vector>

#include "anslab/coding.hpp"

namespace anslab {

/// Input sequence of symbol indices.
struct SymbolFrame {
  std::vector<std::uint32_t> symbols;

  std::size_t length() const { return symbols.size(); }
  bool operator==(const SymbolFrame&) const = default;
};

/// Encoded output: payload bits (per-step chunks in emission order, each
/// chunk MSB-first, packed MSB-first into bytes) plus the final state.
struct BinaryFrame {
  std::vector<std::uint8_t> payload;
  std::uint64_t bit_length = 0;
  std::uint32_t final_state = 0;
};

/// Frame encoding: processes symbols last-to-first starting from x_init.
/// k = 0 steps emit no bits (void encodings).
BinaryFrame encode(const SymbolFrame& frame, const CodingTables& tables,
                   std::uint32_t x_init);

/// Frame decoding: returns exactly `length` symbols in frame order. Throws
/// std::out_of_range when the payload is exhausted early.
SymbolFrame decode(const BinaryFrame& frame, const CodingTables& tables,
                   std::uint64_t length);

/// decode() plus the state left after the last step (equals the encoder's
/// x_init on a clean round-trip).
std::pair<SymbolFrame, std::uint32_t> decode_with_state(const BinaryFrame& frame,
                                                        const CodingTables& tables,
                                                        std::uint64_t length);

}  // namespace anslab
