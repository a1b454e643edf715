#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anslab/frame.hpp"

namespace anslab {

// Compressed container layout (all integers big-endian):
//   magic "ANS1" | R u8 | alphabet size u16 | L_s u16 per symbol |
//   frame length u64 | x_0 u32 | payload bit length u64 | payload bytes
// Keyed containers use magic "ANSK" and insert a u32 CRC-32 of the decoded
// byte stream between the bit-length field and the payload.
struct ContainerHeader {
  std::uint32_t R = 0;
  std::vector<std::uint16_t> counts;  // one per alphabet slot; 0 = absent
  std::uint64_t frame_length = 0;
  std::uint32_t final_state = 0;
  std::uint64_t payload_bits = 0;
  std::optional<std::uint32_t> checksum;  // present in keyed containers
};

inline constexpr char kContainerMagic[4] = {'A', 'N', 'S', '1'};
inline constexpr char kKeyedContainerMagic[4] = {'A', 'N', 'S', 'K'};

void write_container(std::ostream& out, const ContainerHeader& header,
                     const std::vector<std::uint8_t>& payload);

/// Throws std::invalid_argument on bad magic or malformed lengths.
ContainerHeader read_container(std::istream& in, std::vector<std::uint8_t>& payload);

}  // namespace anslab
