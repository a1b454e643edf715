#include "anslab/keyed.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <sstream>
#include <stdexcept>

#include "anslab/optimize.hpp"
#include "anslab/tuning.hpp"

namespace anslab::keyed {

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Canonical public-statistics serialization fed into the seed derivation.
// Both sides must produce identical bytes for identical (probs, R, theta).
std::string transcript(const SymbolDistribution& dist, std::uint32_t iterations) {
  std::ostringstream out;
  out << kProtocolVersion << '\n';
  out << "R=" << dist.table_exponent() << '\n';
  out << "theta=" << iterations << '\n';
  for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
    out << dist.symbols()[s] << '\t' << rational_string(dist.prob(s)) << '\t'
        << dist.count(s) << '\n';
  return out.str();
}

std::uint64_t derive_seed(const Key& key, const std::string& transcript_text) {
  unsigned char mac[EVP_MAX_MD_SIZE];
  std::size_t mac_len = sizeof(mac);
  if (!EVP_Q_mac(nullptr, "HMAC", nullptr, "SHA256", nullptr, key.data(), key.size(),
                 reinterpret_cast<const unsigned char*>(transcript_text.data()),
                 transcript_text.size(), mac, sizeof(mac), &mac_len) ||
      mac_len < 8)
    throw std::runtime_error("HMAC-SHA256 failed");
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed = (seed << 8) | mac[i];
  return seed;
}

}  // namespace

Key key_from_hex(const std::string& hex) {
  if (hex.size() != 64)
    throw std::invalid_argument("key must be 64 hex characters (256 bits)");
  Key key{};
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_nibble(hex[2 * i]), lo = hex_nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("key contains non-hex characters");
    key[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return key;
}

KeyedSession derive_keyed_spread(const Key& key, const std::vector<Rational>& probs,
                                 std::uint32_t R, std::uint32_t iterations,
                                 std::vector<std::string> symbols) {
  if (iterations < 1) throw std::invalid_argument("need at least one search iteration");
  SymbolDistribution dist = quantize(probs, R, std::move(symbols));

  opt::SearchConfig cfg;
  cfg.threshold = 0.0;  // dH >= 0, so the search never exits early: both
                        // sides perform exactly `iterations` steps
  cfg.max_iterations = iterations;
  cfg.seed = derive_seed(key, transcript(dist, iterations));
  cfg.init = opt::InitSpread::rank;  // public, deterministic starting point
  cfg.objective = opt::Objective::minimize;

  opt::SearchTrace trace = opt::swap_search(dist, cfg);
  CodingTables tables = CodingTables::build(dist, trace.final_spread);
  return KeyedSession{key,
                      cfg.seed,
                      iterations,
                      std::move(dist),
                      std::move(trace.final_spread),
                      std::move(tables),
                      std::move(trace.report)};
}

std::string session_digest(const KeyedSession& session) {
  std::ostringstream out;
  out << transcript(session.dist, session.iterations);
  for (auto s : session.spread.assignment()) out << s << ',';
  const std::string text = out.str();
  unsigned char md[EVP_MAX_MD_SIZE];
  std::size_t md_len = 0;
  if (!EVP_Q_digest(nullptr, "SHA256", nullptr, text.data(), text.size(), md, &md_len))
    throw std::runtime_error("SHA256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out_hex;
  out_hex.reserve(2 * md_len);
  for (std::size_t i = 0; i < md_len; ++i) {
    out_hex.push_back(hex[md[i] >> 4]);
    out_hex.push_back(hex[md[i] & 0xf]);
  }
  return out_hex;
}

std::uint32_t frame_checksum(const std::vector<std::uint8_t>& bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, bytes.empty() ? Z_NULL : bytes.data(), static_cast<uInt>(bytes.size())));
}

BinaryFrame keyed_encode(const KeyedSession& session, const SymbolFrame& frame,
                         std::uint32_t x_init) {
  return encode(frame, session.tables, x_init);
}

SymbolFrame keyed_decode(const KeyedSession& session, const BinaryFrame& frame,
                         std::uint64_t length) {
  return decode(frame, session.tables, length);
}

}  // namespace anslab::keyed
