#include "doctest.h"

#include <array>
#include <cmath>

#include "anslab/markov.hpp"
#include "anslab/optimize.hpp"
#include "anslab/prng.hpp"
#include "golden.hpp"

using namespace anslab;
using markov::Arithmetic;

namespace {

// the printed 16x16 matrix for the worked example, numerators over 16
constexpr std::array<std::array<int, 16>, 16> kExampleMatrix16{{
    {-8, 8, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, -16, 8, 8, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, -16, 0, 0, 0, 0, 0, 3, 3, 3, 3, 3, 3, 3, 3},
    {0, 0, 0, -16, 5, 5, 5, 5, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, -16, 0, 0, 0, 5, 5, 5, 5, 0, 0, 0, 0},
    {0, 0, 0, 0, 8, -8, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {3, 3, 3, 3, 0, 0, -16, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, -16, 0, 0, 0, 0, 5, 5, 5, 5},
    {0, 0, 0, 0, 0, 0, 8, 8, -16, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 3, 3, 3, 3, 0, -16, 0, 0, 0, 0, 0, 0},
    {5, 5, 0, 0, 0, 0, 0, 0, 0, 0, -16, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 8, 8, 0, -16, 0, 0, 0, 0},
    {0, 0, 5, 5, 0, 0, 0, 0, 0, 0, 0, 0, -16, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 8, 8, 0, -16, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 8, 8, -16, 0},
    {16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 16},
}};

SymbolSpread random_example_spread(std::uint64_t seed) {
  return opt::random_spread(golden::example_dist(), seed);
}

}  // namespace

TEST_CASE("transition system matches the printed worked-example matrix") {
  const auto dist = golden::example_dist();
  const auto tables = CodingTables::build(dist, golden::example_spread());
  const auto sys = markov::build_transition_system(tables, dist);
  REQUIRE(sys.dim() == 16);
  for (std::uint32_t r = 0; r < 16; ++r)
    for (std::uint32_t c = 0; c < 16; ++c)
      CHECK(sys.entry(r, c) == make_fraction(kExampleMatrix16[r][c], 16));
  for (std::uint32_t r = 0; r < 16; ++r)
    CHECK(sys.rhs(r) == (r == 15 ? Rational(1) : Rational(0)));
}

TEST_CASE("two-state coder system") {
  const auto dist = quantize({Rational(1, 2), Rational(1, 2)}, 1);
  const auto tables = CodingTables::build(dist, SymbolSpread(1, {0, 1}));
  const auto sys = markov::build_transition_system(tables, dist);
  CHECK(sys.entry(0, 0) == make_fraction(-1, 2));
  CHECK(sys.entry(0, 1) == make_fraction(1, 2));
  CHECK(sys.entry(1, 0) == Rational(1));
  CHECK(sys.entry(1, 1) == Rational(1));
  CHECK(sys.rhs(0) == 0);
  CHECK(sys.rhs(1) == 1);

  const auto eq = markov::solve_equilibrium(sys, Arithmetic::exact, 2);
  CHECK(eq.prob_exact(2) == Rational(1, 2));
  CHECK(eq.prob_exact(3) == Rational(1, 2));
}

TEST_CASE("column sums are 1 before the normalization overwrite") {
  // construction audit: per source column, the accumulated mass (diagonal
  // restored to 0, last-row entry reconstructed from the tables) sums to 1
  SplitMix64 rng(3);
  const auto dist = golden::example_dist();
  const std::uint32_t L = dist.state_count();
  for (int trial = 0; trial < 30; ++trial) {
    const auto spread = random_example_spread(rng.next());
    const auto tables = CodingTables::build(dist, spread);
    const auto sys = markov::build_transition_system(tables, dist);
    for (std::uint32_t c = 0; c < L; ++c) {
      Rational sum = 0;
      for (std::uint32_t r = 0; r + 1 < L; ++r)
        sum += sys.entry(r, c) + (r == c ? Rational(1) : Rational(0));
      Rational last = 0;  // overwritten row, rebuilt from the encode table
      for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
        if (tables.next_state(s, L + c) == 2 * L - 1) last += dist.prob(s);
      sum += last;
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("exact equilibrium reproduces the printed fractions") {
  const auto dist = golden::example_dist();

  SUBCASE("first worked spread") {
    const auto tables = CodingTables::build(dist, golden::example_spread());
    const auto eq = markov::solve_equilibrium(tables, dist, Arithmetic::exact);
    const auto want = golden::example_equilibrium();
    for (std::uint32_t x = 16; x < 32; ++x) CHECK(eq.prob_exact(x) == want[x - 16]);

    const auto rep = markov::redundancy(eq, tables, dist);
    CHECK(rep.kappa == doctest::Approx(1.4790168845).epsilon(1e-9));
    CHECK(rep.entropy == doctest::Approx(1.4772170014).epsilon(1e-9));
    CHECK(rep.delta_h == doctest::Approx(0.0017998831).epsilon(1e-7));
  }

  SUBCASE("swap-variant spread") {
    const auto tables = CodingTables::build(dist, golden::swapped_spread());
    const auto eq = markov::solve_equilibrium(tables, dist, Arithmetic::exact);
    const auto want = golden::swapped_equilibrium();
    for (std::uint32_t x = 16; x < 32; ++x) CHECK(eq.prob_exact(x) == want[x - 16]);

    // kappa follows from the fractions: 454321/307200 = 1.4789095052
    const auto rep = markov::redundancy(eq, tables, dist);
    CHECK(rep.kappa_exact == Rational(454321, 307200));
    CHECK(rep.kappa == doctest::Approx(1.4789095052).epsilon(1e-9));
    CHECK(rep.delta_h == doctest::Approx(0.0016925038).epsilon(1e-6));
  }

  SUBCASE("extreme spreads of the exhaustive study") {
    const auto tw = CodingTables::build(dist, golden::worst_spread());
    const auto rw = markov::redundancy(
        markov::solve_equilibrium(tw, dist, Arithmetic::exact), tw, dist);
    CHECK(rw.kappa_exact == Rational(97, 64));

    const auto tb = CodingTables::build(dist, golden::best_spread());
    const auto rb = markov::redundancy(
        markov::solve_equilibrium(tb, dist, Arithmetic::exact), tb, dist);
    CHECK(rb.kappa_exact == Rational(3619, 2448));
  }
}

TEST_CASE("dyadic coders are optimal: dH = 0 exactly") {
  const auto dist = quantize(
      {Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 8)}, 3);
  REQUIRE(dist.dyadic());
  SplitMix64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spread = opt::random_spread(dist, rng.next());
    const auto tables = CodingTables::build(dist, spread);
    const auto eq = markov::solve_equilibrium(tables, dist, Arithmetic::exact);
    const auto rep = markov::redundancy(eq, tables, dist);
    CHECK(rep.delta_h == 0.0);
    // constant per-symbol code length k_s = i
    for (std::size_t s = 0; s < dist.alphabet_size(); ++s) {
      const unsigned i = dist.table_exponent() - floor_log2(dist.count(s));
      CHECK(rep.kappa_per_symbol_exact[s] == Rational(i));
    }
  }
}

TEST_CASE("stationarity: T P = P") {
  const auto dist = golden::example_dist();
  SplitMix64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const auto spread = random_example_spread(rng.next());
    const auto tables = CodingTables::build(dist, spread);
    markov::EquilibriumDistribution eq;
    try {
      eq = markov::solve_equilibrium(tables, dist, Arithmetic::exact);
    } catch (const markov::SingularSystemError&) {
      continue;
    }
    const std::uint32_t L = dist.state_count();
    std::vector<Rational> image(L, Rational(0));
    for (std::uint32_t x = L; x < 2 * L; ++x)
      for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
        image[tables.next_state(s, x) - L] += dist.prob(s) * eq.prob_exact(x);
    Rational sum = 0;
    for (std::uint32_t i = 0; i < L; ++i) {
      CHECK(image[i] == eq.prob_exact(L + i));  // exact stationarity
      CHECK(eq.prob_exact(L + i) >= 0);
      sum += eq.prob_exact(L + i);
    }
    CHECK(sum == 1);
  }
}

TEST_CASE("exact and floating solutions agree to 1e-10") {
  const auto dist = golden::example_dist();
  SplitMix64 rng(31);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto spread = random_example_spread(rng.next());
    const auto tables = CodingTables::build(dist, spread);
    const auto sys = markov::build_transition_system(tables, dist);
    markov::EquilibriumDistribution exact, approx;
    try {
      exact = markov::solve_equilibrium(sys, Arithmetic::exact, 16);
      approx = markov::solve_equilibrium(sys, Arithmetic::floating, 16);
    } catch (const markov::SingularSystemError&) {
      continue;
    }
    ++compared;
    for (std::uint32_t x = 16; x < 32; ++x)
      CHECK(std::abs(exact.prob(x) - approx.prob(x)) < 1e-10);
  }
  CHECK(compared > 40);
}

TEST_CASE("entropy floor over random spreads") {
  const auto dist = golden::example_dist();
  SplitMix64 rng(47);
  int evaluated = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto spread = random_example_spread(rng.next());
    const auto tables = CodingTables::build(dist, spread);
    try {
      const auto eq = markov::solve_equilibrium(tables, dist, Arithmetic::floating);
      const auto rep = markov::redundancy(eq, tables, dist);
      CHECK(rep.delta_h >= -1e-12);
      ++evaluated;
    } catch (const markov::SingularSystemError&) {
    }
  }
  CHECK(evaluated > 9000);
}

TEST_CASE("monte-carlo simulation") {
  const auto dist = golden::example_dist();
  const auto tables = CodingTables::build(dist, golden::example_spread());

  SUBCASE("deterministic given (seed, steps)") {
    const auto a = markov::simulate_empirical(tables, dist, 20000, 7);
    const auto b = markov::simulate_empirical(tables, dist, 20000, 7);
    CHECK(a.probs == b.probs);
    const auto c = markov::simulate_empirical(tables, dist, 20000, 8);
    CHECK(a.probs != c.probs);
  }
  SUBCASE("frequencies approach the exact solution") {
    const auto eq = markov::solve_equilibrium(tables, dist, Arithmetic::exact);
    const auto mc = markov::simulate_empirical(tables, dist, 2000000, 42);
    for (std::uint32_t x = 16; x < 32; ++x)
      CHECK(std::abs(mc.prob(x) - eq.prob(x)) < 2e-3);
  }
  SUBCASE("two-state coder reaches (1/2, 1/2)") {
    const auto d2 = quantize({Rational(1, 2), Rational(1, 2)}, 1);
    const auto t2 = CodingTables::build(d2, SymbolSpread(1, {0, 1}));
    const auto mc = markov::simulate_empirical(t2, d2, 1000000, 1);
    CHECK(std::abs(mc.prob(2) - 0.5) < 1e-3);
    CHECK(std::abs(mc.prob(3) - 0.5) < 1e-3);
  }
  SUBCASE("step floor enforced") {
    CHECK_THROWS_AS(markov::simulate_empirical(tables, dist, 100, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("exact solve on a float-only system is a logic error") {
  const auto dist = golden::example_dist();
  const auto tables = CodingTables::build(dist, golden::example_spread());
  const auto sys =
      markov::build_transition_system(tables, dist, Arithmetic::floating);
  CHECK_THROWS_AS(markov::solve_equilibrium(sys, Arithmetic::exact, 16), std::logic_error);
}
