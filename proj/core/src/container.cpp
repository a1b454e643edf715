#include "anslab/container.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace anslab {

namespace {

void put_be(std::ostream& out, std::uint64_t v, unsigned bytes) {
  for (unsigned i = bytes; i-- > 0;) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_be(std::istream& in, unsigned bytes) {
  std::uint64_t v = 0;
  for (unsigned i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == EOF) throw std::invalid_argument("container truncated");
    v = (v << 8) | static_cast<std::uint8_t>(c);
  }
  return v;
}

}  // namespace

void write_container(std::ostream& out, const ContainerHeader& header,
                     const std::vector<std::uint8_t>& payload) {
  if (header.R < 1 || header.R > 16)
    throw std::invalid_argument("container supports R in [1,16]");
  if (header.counts.size() > 0xffff)
    throw std::invalid_argument("alphabet too large for the container");
  if ((header.payload_bits + 7) / 8 > payload.size())
    throw std::invalid_argument("payload shorter than its bit length");

  out.write(header.checksum ? kKeyedContainerMagic : kContainerMagic, 4);
  put_be(out, header.R, 1);
  put_be(out, header.counts.size(), 2);
  for (auto c : header.counts) put_be(out, c, 2);
  put_be(out, header.frame_length, 8);
  put_be(out, header.final_state, 4);
  put_be(out, header.payload_bits, 8);
  if (header.checksum) put_be(out, *header.checksum, 4);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>((header.payload_bits + 7) / 8));
  if (!out) throw std::runtime_error("container write failed");
}

ContainerHeader read_container(std::istream& in, std::vector<std::uint8_t>& payload) {
  char magic[4];
  in.read(magic, 4);
  if (!in) throw std::invalid_argument("container truncated");
  bool keyed = false;
  if (std::memcmp(magic, kKeyedContainerMagic, 4) == 0)
    keyed = true;
  else if (std::memcmp(magic, kContainerMagic, 4) != 0)
    throw std::invalid_argument("bad container magic");

  ContainerHeader h;
  h.R = static_cast<std::uint32_t>(get_be(in, 1));
  if (h.R < 1 || h.R > 16) throw std::invalid_argument("container R out of range");
  const std::size_t n = static_cast<std::size_t>(get_be(in, 2));
  h.counts.resize(n);
  for (auto& c : h.counts) c = static_cast<std::uint16_t>(get_be(in, 2));
  h.frame_length = get_be(in, 8);
  h.final_state = static_cast<std::uint32_t>(get_be(in, 4));
  h.payload_bits = get_be(in, 8);
  if (keyed) h.checksum = static_cast<std::uint32_t>(get_be(in, 4));

  const std::uint64_t bytes = (h.payload_bits + 7) / 8;
  if (bytes > (1ull << 33))
    throw std::invalid_argument("container payload length implausible");
  payload.resize(bytes);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::uint64_t>(in.gcount()) != bytes)
    throw std::invalid_argument("container payload truncated");
  return h;
}

}  // namespace anslab
