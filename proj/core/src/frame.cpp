#include "anslab/frame.hpp"

#include <stdexcept>

#include "anslab/bitstream.hpp"

namespace anslab {

BinaryFrame encode(const SymbolFrame& frame, const CodingTables& tables,
                   std::uint32_t x_init) {
  const std::uint32_t L = tables.state_count();
  if (x_init < L || x_init >= 2 * L)
    throw std::invalid_argument("initial state outside I");

  BitWriter writer;
  std::uint32_t x = x_init;
  for (auto it = frame.symbols.rbegin(); it != frame.symbols.rend(); ++it) {
    const std::uint32_t s = *it;
    if (s >= tables.alphabet_size())
      throw std::invalid_argument("symbol outside the alphabet");
    const unsigned k = tables.k_bits(s, x);
    if (k > 0) writer.push(x & ((1u << k) - 1), k);
    x = tables.next_state(s, x);
  }

  BinaryFrame out;
  out.bit_length = writer.bit_count();
  out.payload = writer.take_bytes();
  out.final_state = x;
  return out;
}

std::pair<SymbolFrame, std::uint32_t> decode_with_state(const BinaryFrame& frame,
                                                        const CodingTables& tables,
                                                        std::uint64_t length) {
  const std::uint32_t L = tables.state_count();
  if (frame.final_state < L || frame.final_state >= 2 * L)
    throw std::invalid_argument("final state outside I");
  if (frame.payload.size() * 8 < frame.bit_length)
    throw std::invalid_argument("payload shorter than its bit length");

  BackwardBitReader reader(frame.payload.data(), frame.bit_length);
  SymbolFrame out;
  out.symbols.reserve(length);
  std::uint32_t x = frame.final_state;
  for (std::uint64_t i = 0; i < length; ++i) {
    const auto [s, y] = tables.decode_at(x);
    const unsigned k = tables.read_bits(y);
    const std::uint32_t b = k ? reader.pop(k) : 0;  // k = 0 reads nothing
    x = (y << k) + b;
    if (x < L || x >= 2 * L) throw std::runtime_error("decoded state left I");
    out.symbols.push_back(s);
  }
  return {std::move(out), x};
}

SymbolFrame decode(const BinaryFrame& frame, const CodingTables& tables,
                   std::uint64_t length) {
  return decode_with_state(frame, tables, length).first;
}

}  // namespace anslab
