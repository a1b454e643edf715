#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace anslab {

// MSB-first bit packing: bit 0 of the stream is bit 7 of byte 0. A k-bit
// chunk is appended most-significant-bit first.
class BitWriter {
 public:
  void push(std::uint32_t value, unsigned k) {
    for (unsigned i = k; i-- > 0;) push_bit((value >> i) & 1u);
  }

  void push_bit(std::uint32_t bit) {
    const std::size_t byte = static_cast<std::size_t>(bits_ >> 3);
    if (byte == buf_.size()) buf_.push_back(0);
    if (bit) buf_[byte] |= static_cast<std::uint8_t>(0x80u >> (bits_ & 7));
    ++bits_;
  }

  std::uint64_t bit_count() const { return bits_; }
  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  std::vector<std::uint8_t> take_bytes() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
  std::uint64_t bits_ = 0;
};

/// Forward MSB-first reader.
class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::uint64_t bit_length)
      : data_(data), bits_(bit_length) {}

  std::uint32_t read(unsigned k) {
    if (cursor_ + k > bits_) throw std::out_of_range("bitstream exhausted");
    std::uint32_t v = 0;
    for (unsigned i = 0; i < k; ++i, ++cursor_)
      v = (v << 1) | ((data_[cursor_ >> 3] >> (7 - (cursor_ & 7))) & 1u);
    return v;
  }

  std::uint64_t remaining() const { return bits_ - cursor_; }

 private:
  const std::uint8_t* data_;
  std::uint64_t bits_;
  std::uint64_t cursor_ = 0;
};

// Consumes chunks from the tail of the stream: pop(k) returns the last k
// unread bits as one MSB-first chunk. The frame decoder uses this because
// the payload stores per-step encodings in emission order (last symbol
// first) while decoding walks the chain back from the final state.
class BackwardBitReader {
 public:
  BackwardBitReader(const std::uint8_t* data, std::uint64_t bit_length)
      : data_(data), cursor_(bit_length) {}

  std::uint32_t pop(unsigned k) {
    if (k > cursor_) throw std::out_of_range("bitstream exhausted");
    cursor_ -= k;
    std::uint32_t v = 0;
    for (unsigned i = 0; i < k; ++i) {
      const std::uint64_t pos = cursor_ + i;
      v = (v << 1) | ((data_[pos >> 3] >> (7 - (pos & 7))) & 1u);
    }
    return v;
  }

  std::uint64_t remaining() const { return cursor_; }

 private:
  const std::uint8_t* data_;
  std::uint64_t cursor_;
};

}  // namespace anslab
