#include "doctest.h"

#include <map>
#include <sstream>

#include "anslab/bitstream.hpp"
#include "anslab/container.hpp"
#include "anslab/distribution.hpp"
#include "anslab/frame.hpp"
#include "anslab/io.hpp"
#include "anslab/prng.hpp"
#include "golden.hpp"

using namespace anslab;

namespace {

SymbolDistribution random_grid_dist(SplitMix64& rng, std::uint32_t R, std::size_t max_syms) {
  const std::uint32_t L = 1u << R;
  const std::size_t n = 2 + rng.next_below(std::min<std::size_t>(max_syms, L) - 1);
  // n-1 distinct cut points over (0, L)
  std::map<std::uint32_t, bool> cuts;
  while (cuts.size() < n - 1) cuts.emplace(1 + static_cast<std::uint32_t>(rng.next_below(L - 1)), true);
  std::vector<std::uint32_t> counts;
  std::uint32_t prev = 0;
  for (auto& [c, _] : cuts) {
    counts.push_back(c - prev);
    prev = c;
  }
  counts.push_back(L - prev);
  return distribution_from_counts(std::move(counts), R);
}

SymbolFrame random_frame(SplitMix64& rng, const SymbolDistribution& dist, std::size_t len) {
  SymbolFrame f;
  f.symbols.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    double u = rng.next_unit();
    std::uint32_t s = 0;
    while (s + 1 < dist.alphabet_size() && u >= dist.prob_d(s)) {
      u -= dist.prob_d(s);
      ++s;
    }
    f.symbols.push_back(s);
  }
  return f;
}

std::string bits_of(std::uint32_t v, unsigned k) {
  std::string s;
  for (unsigned i = k; i-- > 0;) s.push_back(((v >> i) & 1) ? '1' : '0');
  return s;
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/16") == Rational(3, 16));
  CHECK(parse_rational("0.1875") == Rational(3, 16));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("-0.5") == Rational(-1, 2));
  CHECK(parse_rational("12") == Rational(12));
  CHECK(rational_string(Rational(3, 16)) == "3/16");
  CHECK(rational_string(Rational(4)) == "4");
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
}

TEST_CASE("quantize worked examples") {
  const auto d1 = quantize({Rational(3, 16), Rational(5, 16), Rational(8, 16)}, 4);
  CHECK(d1.counts() == std::vector<std::uint32_t>{3, 5, 8});

  const auto d2 = quantize({Rational(1, 2), Rational(1, 2)}, 3);
  CHECK(d2.counts() == std::vector<std::uint32_t>{4, 4});

  const auto d3 = quantize(
      {Rational(2, 5), Rational(7, 20), Rational(1, 5), Rational(1, 20)}, 4);
  CHECK(d3.counts()[3] == 1);  // tail: 0.05 * 16 < 1
  std::uint32_t sum = 0;
  for (auto c : d3.counts()) sum += c;
  CHECK(sum == 16);
}

TEST_CASE("quantize matches the brute-force L1 minimizer") {
  // all count vectors with the tail rule applied, minimizing sum |L_s/L - p_s|
  const std::vector<Rational> probs{Rational(2, 5), Rational(7, 20), Rational(1, 5),
                                    Rational(1, 20)};
  const std::uint32_t L = 16;
  std::vector<std::uint32_t> best;
  Rational best_err;
  std::vector<std::uint32_t> cur(4);
  auto rec = [&](auto&& self, std::size_t s, std::uint32_t left) -> void {
    if (s == 4) {
      if (left != 0) return;
      Rational err = 0;
      for (std::size_t i = 0; i < 4; ++i) {
        Rational d = Rational(cur[i], L) - probs[i];
        err += d < 0 ? Rational(-d) : d;
      }
      if (best.empty() || err < best_err) {
        best = cur;
        best_err = err;
      }
      return;
    }
    const bool tail = probs[s] * L < 1;
    const std::uint32_t lo = 1, hi = tail ? 1 : left;
    for (std::uint32_t c = lo; c <= hi && c <= left; ++c) {
      cur[s] = c;
      self(self, s + 1, left - c);
    }
  };
  rec(rec, 0, L);

  const auto quantized = quantize(probs, 4);
  CHECK(quantized.counts() == best);
  CHECK(best == std::vector<std::uint32_t>{6, 6, 3, 1});
}

TEST_CASE("quantize error paths") {
  CHECK_THROWS_AS(quantize({Rational(1, 2), Rational(1, 4)}, 4), std::invalid_argument);
  std::vector<Rational> many(17, Rational(1, 17));
  CHECK_THROWS_AS(quantize(many, 4), std::invalid_argument);  // 17 symbols, 16 states
  CHECK_THROWS_AS(quantize({Rational(1, 1)}, 4), std::invalid_argument);
}

TEST_CASE("quantize given_counts mode") {
  const auto d = quantize({Rational(3), Rational(5), Rational(8)}, 4,
                          QuantizeMode::given_counts);
  CHECK(d.counts() == std::vector<std::uint32_t>{3, 5, 8});
  CHECK(d.prob(0) == Rational(3, 16));
  CHECK_THROWS_AS(quantize({Rational(3), Rational(5)}, 4, QuantizeMode::given_counts),
                  std::invalid_argument);  // sums to 8, not 16
}

TEST_CASE("coding tables reproduce the worked 16-state table") {
  const auto dist = golden::example_dist();
  const auto tables = CodingTables::build(dist, golden::example_spread());
  const auto& expect = golden::encode_table();
  for (std::size_t s = 0; s < 3; ++s)
    for (std::uint32_t x = 16; x < 32; ++x) {
      const auto& cell = expect[s][x - 16];
      const unsigned k = tables.k_bits(s, x);
      CHECK(tables.next_state(s, x) == cell.next);
      CHECK(bits_of(x & ((1u << k) - 1), k) == cell.bits);
    }
}

TEST_CASE("smallest coder: two symbols, R=1") {
  const auto dist = quantize({Rational(1, 2), Rational(1, 2)}, 1);
  const auto spread = SymbolSpread(1, {0, 1});  // 2 -> a, 3 -> b
  const auto tables = CodingTables::build(dist, spread);
  CHECK(tables.coding_fn(0, 1) == 2);
  CHECK(tables.coding_fn(1, 1) == 3);
  for (std::uint32_t x = 2; x <= 3; ++x)
    for (std::size_t s = 0; s < 2; ++s) CHECK(tables.k_bits(s, x) == 1);
}

TEST_CASE("tables reject a mismatched spread") {
  const auto dist = golden::example_dist();
  const SymbolSpread all_s3(4, std::vector<std::uint32_t>(16, 2));
  CHECK_THROWS_AS(CodingTables::build(dist, all_s3), std::invalid_argument);
}

TEST_CASE("decode function inverts the coding function") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dist = random_grid_dist(rng, 2 + rng.next_below(5), 6);
    std::vector<std::uint32_t> canonical;
    for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
      canonical.insert(canonical.end(), dist.count(s), static_cast<std::uint32_t>(s));
    const auto tables = CodingTables::build(
        dist, SymbolSpread(dist.table_exponent(), std::move(canonical)));
    // bijectivity: {C(s, y)} over all (s, y) covers I exactly once
    std::vector<int> seen(dist.state_count(), 0);
    for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
      for (std::uint32_t y = dist.count(s); y < 2 * dist.count(s); ++y) {
        const std::uint32_t x = tables.coding_fn(s, y);
        ++seen[x - dist.state_count()];
        const auto [ds, dy] = tables.decode_at(x);
        CHECK(ds == s);
        CHECK(dy == y);
      }
    for (int c : seen) CHECK(c == 1);
  }
}

TEST_CASE("encode worked examples") {
  const auto dist = golden::example_dist();
  const auto tables = CodingTables::build(dist, golden::example_spread());

  SUBCASE("single s3 from state 16") {
    const auto bf = encode(SymbolFrame{{2}}, tables, 16);
    CHECK(bf.bit_length == 1);
    CHECK((bf.payload[0] >> 7) == 0);
    CHECK(bf.final_state == 16);
  }
  SUBCASE("s1 from 16: k=2 bits 00 next 22") {
    const auto bf = encode(SymbolFrame{{0}}, tables, 16);
    CHECK(bf.bit_length == 2);
    CHECK((bf.payload[0] >> 6) == 0);
    CHECK(bf.final_state == 22);
  }
  SUBCASE("s1 from 24: k=3 bits 000 next 18") {
    const auto bf = encode(SymbolFrame{{0}}, tables, 24);
    CHECK(bf.bit_length == 3);
    CHECK((bf.payload[0] >> 5) == 0);
    CHECK(bf.final_state == 18);
  }
  SUBCASE("empty frame is the identity") {
    const auto bf = encode(SymbolFrame{}, tables, 23);
    CHECK(bf.bit_length == 0);
    CHECK(bf.final_state == 23);
    const auto back = decode(bf, tables, 0);
    CHECK(back.symbols.empty());
  }
  SUBCASE("unknown symbol rejected") {
    CHECK_THROWS_AS(encode(SymbolFrame{{7}}, tables, 16), std::invalid_argument);
    CHECK_THROWS_AS(encode(SymbolFrame{{0}}, tables, 5), std::invalid_argument);
  }
}

TEST_CASE("decode inverts the worked examples and handles y = L/2") {
  const auto dist = golden::example_dist();
  const auto tables = CodingTables::build(dist, golden::example_spread());
  for (std::uint32_t x0 = 16; x0 < 32; ++x0) {
    for (std::uint32_t s = 0; s < 3; ++s) {
      const SymbolFrame f{{s}};
      const auto bf = encode(f, tables, x0);
      const auto [back, x_init] = decode_with_state(bf, tables, 1);
      CHECK(back == f);
      CHECK(x_init == x0);
    }
  }
  // y = L_s = L/2 forces a single-bit read
  CHECK(tables.read_bits(8) == 1);
}

TEST_CASE("payload exhaustion is detected") {
  const auto dist = golden::example_dist();
  const auto tables = CodingTables::build(dist, golden::example_spread());
  auto bf = encode(SymbolFrame{{0, 1, 2, 0}}, tables, 16);
  bf.bit_length = bf.bit_length > 2 ? 2 : 0;  // truncate
  CHECK_THROWS_AS(decode(bf, tables, 4), std::out_of_range);
}

TEST_CASE("round-trips over random coders (incl. void-bit symbols)") {
  SplitMix64 rng(20240809);
  int void_coders = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    const std::uint32_t R = 1 + static_cast<std::uint32_t>(rng.next_below(6));
    const auto dist = random_grid_dist(rng, R, 8);
    const auto spread = [&] {
      std::vector<std::uint32_t> a;
      for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
        a.insert(a.end(), dist.count(s), static_cast<std::uint32_t>(s));
      SplitMix64 shuffle(rng.next());
      for (std::size_t i = a.size(); i > 1; --i)
        std::swap(a[i - 1], a[shuffle.next_below(i)]);
      return SymbolSpread(R, std::move(a));
    }();
    const auto tables = CodingTables::build(dist, spread);
    for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
      if (dist.count(s) > dist.state_count() / 2) {
        ++void_coders;
        break;
      }

    const auto frame = random_frame(rng, dist, rng.next_below(300));
    const std::uint32_t x0 = dist.state_count() +
                             static_cast<std::uint32_t>(rng.next_below(dist.state_count()));
    const auto bf = encode(frame, tables, x0);
    const auto [back, x_init] = decode_with_state(bf, tables, frame.length());
    REQUIRE(back == frame);
    REQUIRE(x_init == x0);
  }
  CHECK(void_coders > 50);  // the k=0 path was actually exercised
}

TEST_CASE("bit-length law") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint32_t R = 2 + static_cast<std::uint32_t>(rng.next_below(5));
    const auto dist = random_grid_dist(rng, R, 8);
    const auto tables = CodingTables::build(
        dist, [&] {
          std::vector<std::uint32_t> a;
          for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
            a.insert(a.end(), dist.count(s), static_cast<std::uint32_t>(s));
          return SymbolSpread(R, std::move(a));
        }());
    const std::uint32_t L = dist.state_count();
    for (std::size_t s = 0; s < dist.alphabet_size(); ++s) {
      const std::uint32_t Ls = dist.count(s);
      if ((Ls & (Ls - 1)) == 0) {
        const unsigned i = R - floor_log2(Ls);
        for (std::uint32_t x = L; x < 2 * L; ++x) CHECK(tables.k_bits(s, x) == i);
      } else {
        const unsigned i = floor_log2(L / Ls);
        for (std::uint32_t x = L; x < 2 * L; ++x) {
          const unsigned k = tables.k_bits(s, x);
          CHECK((k == i || k == i + 1));
        }
      }
    }
  }
}

TEST_CASE("payload is the emission-order concatenation of the step chunks") {
  const auto dist = golden::example_dist();
  const auto tables = CodingTables::build(dist, golden::example_spread());
  SplitMix64 rng(5);
  const auto frame = random_frame(rng, dist, 64);

  // manual walk, collecting chunk strings in emission order
  std::string bits;
  std::uint32_t x = 16;
  for (auto it = frame.symbols.rbegin(); it != frame.symbols.rend(); ++it) {
    const unsigned k = tables.k_bits(*it, x);
    bits += bits_of(x & ((1u << k) - 1), k);
    x = tables.next_state(*it, x);
  }

  const auto bf = encode(frame, tables, 16);
  REQUIRE(bf.bit_length == bits.size());
  std::string packed;
  for (std::uint64_t i = 0; i < bf.bit_length; ++i)
    packed.push_back((bf.payload[i >> 3] >> (7 - (i & 7))) & 1 ? '1' : '0');
  CHECK(packed == bits);
  CHECK(decode(bf, tables, frame.length()) == frame);
}

TEST_CASE("bitstream primitives") {
  BitWriter w;
  w.push(0b101, 3);
  w.push(0b01, 2);
  w.push(0b11001, 5);
  CHECK(w.bit_count() == 10);
  const auto bytes = w.bytes();
  BitReader fwd(bytes.data(), 10);
  CHECK(fwd.read(3) == 0b101);
  CHECK(fwd.read(2) == 0b01);
  CHECK(fwd.read(5) == 0b11001);
  CHECK_THROWS_AS(fwd.read(1), std::out_of_range);

  BackwardBitReader bwd(bytes.data(), 10);
  CHECK(bwd.pop(5) == 0b11001);
  CHECK(bwd.pop(2) == 0b01);
  CHECK(bwd.pop(0) == 0);
  CHECK(bwd.pop(3) == 0b101);
  CHECK_THROWS_AS(bwd.pop(1), std::out_of_range);
}

TEST_CASE("container round-trip") {
  ContainerHeader h;
  h.R = 4;
  h.counts = {3, 5, 8};
  h.frame_length = 7;
  h.final_state = 19;
  h.payload_bits = 11;
  std::vector<std::uint8_t> payload{0xAB, 0xC0};

  std::stringstream buf;
  write_container(buf, h, payload);
  std::vector<std::uint8_t> back_payload;
  const auto back = read_container(buf, back_payload);
  CHECK(back.R == 4);
  CHECK(back.counts == std::vector<std::uint16_t>{3, 5, 8});
  CHECK(back.frame_length == 7);
  CHECK(back.final_state == 19);
  CHECK(back.payload_bits == 11);
  CHECK_FALSE(back.checksum.has_value());
  CHECK(back_payload == payload);

  SUBCASE("keyed variant carries a checksum") {
    h.checksum = 0xDEADBEEF;
    std::stringstream buf2;
    write_container(buf2, h, payload);
    std::vector<std::uint8_t> p2;
    const auto b2 = read_container(buf2, p2);
    REQUIRE(b2.checksum.has_value());
    CHECK(*b2.checksum == 0xDEADBEEF);
  }
  SUBCASE("bad magic rejected") {
    std::stringstream bad("BOGUS data");
    std::vector<std::uint8_t> p;
    CHECK_THROWS_AS(read_container(bad, p), std::invalid_argument);
  }
  SUBCASE("truncation rejected") {
    std::stringstream buf3;
    write_container(buf3, h, payload);
    std::string s = buf3.str();
    s.resize(s.size() - 1);
    std::stringstream trunc(s);
    std::vector<std::uint8_t> p;
    CHECK_THROWS_AS(read_container(trunc, p), std::invalid_argument);
  }
}

TEST_CASE("dist and spread file io") {
  std::stringstream dist_text("# comment\ns1\t3/16\ns2\t5/16\ns3\t0.5\n");
  const auto file = io::read_dist_file(dist_text);
  CHECK_FALSE(file.counts);
  const auto probs = io::dist_file_probs(file);
  CHECK(probs[2] == Rational(1, 2));

  std::stringstream counts_text("a\t30\nb\t50\nc\t80\n");
  const auto counts_file = io::read_dist_file(counts_text);
  CHECK(counts_file.counts);
  const auto norm = io::dist_file_probs(counts_file);
  CHECK(norm[0] == Rational(3, 16));

  const auto dist = golden::example_dist();
  std::stringstream spread_text;
  io::write_spread_file(spread_text, golden::example_spread(), dist);
  const auto spread = io::read_spread_file(spread_text, dist);
  CHECK(spread == golden::example_spread());

  std::stringstream bad("16\ts1\n17\ts1\n");
  CHECK_THROWS_AS(io::read_spread_file(bad, dist), std::invalid_argument);

  std::stringstream not_one("s1\t0.5\ns2\t0.6\n");
  CHECK_THROWS_AS(io::dist_file_probs(io::read_dist_file(not_one)), std::invalid_argument);
}
