#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "anslab/coding.hpp"
#include "anslab/distribution.hpp"
#include "anslab/frame.hpp"
#include "anslab/markov.hpp"
#include "anslab/spread.hpp"

namespace anslab::keyed {

inline constexpr const char* kProtocolVersion = "anslab-keyed-v1";

using Key = std::array<std::uint8_t, 32>;

/// Parses 64 hex chars; throws std::invalid_argument otherwise.
Key key_from_hex(const std::string& hex);

// Both parties derive the same secret spread from (K, public statistics).
// The count vector {L_s} stays public; the spread is the secret. This is a
// compression-rate-preserving scrambler, not strong encryption.
struct KeyedSession {
  Key key{};
  std::uint64_t seed = 0;       // HMAC-derived search seed
  std::uint32_t iterations = 0; // fixed theta, no early exit
  SymbolDistribution dist;
  SymbolSpread spread;
  CodingTables tables;
  markov::RedundancyReport report;
};

/// Deterministic pipeline: quantize -> rank-match init (public) -> swap
/// search seeded with HMAC-SHA256(K, protocol || dist digest || theta),
/// minimizing for exactly `iterations` steps.
KeyedSession derive_keyed_spread(const Key& key, const std::vector<Rational>& probs,
                                 std::uint32_t R, std::uint32_t iterations = 1000,
                                 std::vector<std::string> symbols = {});

/// Digest of the public statistics under the session protocol (hex); feeds
/// the seed derivation and identifies compatible sessions.
std::string session_digest(const KeyedSession& session);

std::uint32_t frame_checksum(const std::vector<std::uint8_t>& bytes);

BinaryFrame keyed_encode(const KeyedSession& session, const SymbolFrame& frame,
                         std::uint32_t x_init);
SymbolFrame keyed_decode(const KeyedSession& session, const BinaryFrame& frame,
                         std::uint64_t length);

}  // namespace anslab::keyed
