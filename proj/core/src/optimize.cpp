#include "anslab/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "anslab/coding.hpp"
#include "anslab/parallel.hpp"
#include "anslab/prng.hpp"
#include "anslab/tuning.hpp"
#include "exact_solve.hpp"

namespace anslab::opt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Floating-point dH evaluator with reused buffers. kappa = w . X where
// w(x) = sum_s p_s k_s(x) depends only on the counts, not on the spread,
// so only the transition matrix is rebuilt per candidate.
class SpreadEvaluator {
 public:
  explicit SpreadEvaluator(const SymbolDistribution& dist)
      : dist_(dist),
        L_(dist.state_count()),
        n_(dist.alphabet_size()),
        m_(L_, L_),
        b_(Eigen::VectorXd::Zero(L_)),
        lu_(L_),
        entropy_(dist.entropy_bits()) {
    b_[L_ - 1] = 1.0;
    // spread-independent per-state bit weights
    SymbolSpread canonical = canonical_spread(dist);
    tables_.rebuild(dist, canonical);
    weights_.resize(L_);
    for (std::uint32_t x = dist.state_count(); x < 2 * dist.state_count(); ++x) {
      double w = 0;
      for (std::size_t s = 0; s < n_; ++s) w += dist.prob_d(s) * tables_.k_bits(s, x);
      weights_[x - dist.state_count()] = w;
    }
  }

  static SymbolSpread canonical_spread(const SymbolDistribution& dist) {
    std::vector<std::uint32_t> assignment;
    assignment.reserve(dist.state_count());
    for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
      assignment.insert(assignment.end(), dist.count(s), static_cast<std::uint32_t>(s));
    return SymbolSpread(dist.table_exponent(), std::move(assignment));
  }

  /// dH of the spread, or +inf when the chain is singular.
  double delta_h(const SymbolSpread& spread) {
    tables_.rebuild(dist_, spread);
    m_.setZero();
    for (std::uint32_t i = 0; i < L_; ++i) m_(i, i) = -1.0;
    const std::uint32_t L = dist_.state_count();
    for (std::uint32_t x = L; x < 2 * L; ++x)
      for (std::size_t s = 0; s < n_; ++s)
        m_(tables_.next_state(s, x) - L, x - L) += dist_.prob_d(s);
    m_.row(L_ - 1).setOnes();

    lu_.compute(m_);
    const auto diag = lu_.matrixLU().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i)
      if (std::abs(diag[i]) < 1e-12) return kInf;

    Eigen::VectorXd x = lu_.solve(b_);
    const double sum = x.sum();
    double kappa = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) kappa += weights_[i] * (x[i] / sum);
    return kappa - entropy_;
  }

 private:
  const SymbolDistribution& dist_;
  Eigen::Index L_;
  std::size_t n_;
  CodingTables tables_;
  Eigen::MatrixXd m_;
  Eigen::VectorXd b_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::vector<double> weights_;
  double entropy_;
};

std::vector<Rational> default_edges() {
  return {make_fraction(37, 25), make_fraction(149, 100), make_fraction(3, 2)};
}

BigInt multinomial(std::uint32_t total, const std::vector<std::uint32_t>& counts) {
  BigInt result;
  mpz_fac_ui(result.get_mpz_t(), total);
  BigInt f;
  for (auto c : counts) {
    mpz_fac_ui(f.get_mpz_t(), c);
    mpz_divexact(result.get_mpz_t(), result.get_mpz_t(), f.get_mpz_t());
  }
  return result;
}

/// index-th lexicographic permutation of the multiset with the given counts.
std::vector<std::uint32_t> unrank_assignment(std::vector<std::uint32_t> counts,
                                             std::uint32_t length, BigInt index) {
  std::vector<std::uint32_t> out;
  out.reserve(length);
  for (std::uint32_t pos = 0; pos < length; ++pos) {
    const std::uint32_t remaining = length - pos;
    for (std::uint32_t s = 0; s < counts.size(); ++s) {
      if (counts[s] == 0) continue;
      --counts[s];
      const BigInt block = multinomial(remaining - 1, counts);
      if (index < block) {
        out.push_back(s);
        break;
      }
      index -= block;
      ++counts[s];
    }
  }
  return out;
}

}  // namespace

SymbolSpread swap_states(const SymbolSpread& spread, std::uint32_t x, std::uint32_t y) {
  const std::uint32_t L = spread.state_count();
  if (x < L || x >= 2 * L || y < L || y >= 2 * L)
    throw std::invalid_argument("swap states must lie in I");
  const std::uint32_t sx = spread.symbol_of(x), sy = spread.symbol_of(y);
  if (sx == sy) throw std::invalid_argument("same-symbol swap is a no-op");
  SymbolSpread out = spread;
  out.set_symbol(x, sy);
  out.set_symbol(y, sx);
  return out;  // sets derived from the assignment are re-sorted implicitly
}

SymbolSpread random_spread(const SymbolDistribution& dist, std::uint64_t seed) {
  std::vector<std::uint32_t> assignment;
  assignment.reserve(dist.state_count());
  for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
    assignment.insert(assignment.end(), dist.count(s), static_cast<std::uint32_t>(s));
  SplitMix64 rng(seed);
  for (std::size_t i = assignment.size(); i > 1; --i)
    std::swap(assignment[i - 1], assignment[rng.next_below(i)]);
  return SymbolSpread(dist.table_exponent(), std::move(assignment));
}

SearchTrace swap_search(const SymbolDistribution& dist, const SearchConfig& cfg) {
  if (cfg.max_iterations < 1) throw std::invalid_argument("need at least one iteration");
  const std::uint32_t L = dist.state_count();
  const auto start = std::chrono::steady_clock::now();

  SplitMix64 rng(cfg.seed);
  SymbolSpread spread;
  switch (cfg.init) {
    case InitSpread::random:
      spread = random_spread(dist, rng.next());
      break;
    case InitSpread::tuned:
      spread = tuning::tune_spread(dist);
      break;
    case InitSpread::rank:
      spread = tuning::rank_match_spread(dist);
      break;
    case InitSpread::explicit_spread:
      if (!cfg.initial) throw std::invalid_argument("explicit init needs a spread");
      spread = *cfg.initial;
      validate_spread(dist, spread);
      break;
  }

  SpreadEvaluator eval(dist);
  const bool minimize = cfg.objective == Objective::minimize;
  auto beats = [&](double cand, double cur) { return minimize ? cand < cur : cand > cur; };
  auto met = [&](double dh) {
    return minimize ? dh < cfg.threshold : dh > cfg.threshold;
  };

  double dh = eval.delta_h(spread);
  if (!minimize && dh == kInf) dh = -kInf;  // singular start never wins

  SearchTrace trace;
  trace.initial_delta_h = dh;

  bool done = false;
  while (!done) {
    for (std::uint32_t x = L; x < 2 * L; ++x) {
      if (met(dh) || trace.iterations >= cfg.max_iterations) {
        done = true;
        break;
      }
      ++trace.iterations;
      const std::uint32_t y = rng.next_state(L);
      const std::uint32_t sx = spread.symbol_of(x), sy = spread.symbol_of(y);
      if (sx == sy) continue;

      ++trace.swaps_attempted;
      spread.set_symbol(x, sy);
      spread.set_symbol(y, sx);
      const double cand = eval.delta_h(spread);
      if (cand == kInf) {
        ++trace.singular_rejections;
        spread.set_symbol(x, sx);
        spread.set_symbol(y, sy);
        continue;
      }
      if ((std::isinf(dh) && !std::isinf(cand)) || beats(cand, dh)) {
        dh = cand;
        trace.good_swaps.push_back({trace.iterations, x, y, cand});
      } else {
        spread.set_symbol(x, sx);
        spread.set_symbol(y, sy);
      }
    }
  }

  trace.reached_threshold = met(dh);
  trace.final_spread = spread;

  const auto tables = CodingTables::build(dist, spread);
  try {
    const auto eq = markov::solve_equilibrium(tables, dist, cfg.report_arithmetic);
    trace.report = markov::redundancy(eq, tables, dist);
  } catch (const markov::SingularSystemError&) {
    trace.final_singular = true;
    trace.report.mode = cfg.report_arithmetic;
    trace.report.kappa = std::numeric_limits<double>::quiet_NaN();
    trace.report.entropy = dist.entropy_bits();
    trace.report.delta_h = std::numeric_limits<double>::quiet_NaN();
  }
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

SpreadHistogram exhaustive_spreads(const SymbolDistribution& dist, std::uint64_t cap,
                                   markov::Arithmetic mode, std::vector<Rational> edges,
                                   unsigned threads) {
  const std::uint32_t L = dist.state_count();
  const std::size_t n = dist.alphabet_size();
  if (threads == 0) threads = default_thread_count();
  if (edges.empty()) edges = default_edges();
  std::sort(edges.begin(), edges.end());

  const BigInt total = multinomial(L, dist.counts());
  if (total > BigInt(static_cast<unsigned long>(cap)))
    throw CapExceededError("spread count " + total.get_str() + " exceeds cap " +
                           std::to_string(cap));
  const std::uint64_t count = total.get_ui();

  const bool exact = mode == markov::Arithmetic::exact;
  const BigInt denom_big = common_denominator(dist.probs());
  if (exact && !denom_big.fits_slong_p())
    throw std::invalid_argument("exact enumeration needs a small common denominator");
  const std::int64_t denom = exact ? static_cast<std::int64_t>(denom_big.get_si()) : 0;

  std::vector<std::int64_t> scaled(n, 0);
  if (exact)
    for (std::size_t s = 0; s < n; ++s) {
      BigInt v = dist.prob(s).get_num() * (denom_big / dist.prob(s).get_den());
      scaled[s] = static_cast<std::int64_t>(v.get_si());
    }

  // spread-independent exact state weights w(x) = sum_s p_s k_s(x)
  SymbolSpread canonical = SpreadEvaluator::canonical_spread(dist);
  CodingTables canonical_tables = CodingTables::build(dist, canonical);
  std::vector<Rational> weights(L);
  for (std::uint32_t x = L; x < 2 * L; ++x) {
    Rational w = 0;
    for (std::size_t s = 0; s < n; ++s)
      w += dist.prob(s) * Rational(canonical_tables.k_bits(s, x));
    w.canonicalize();
    weights[x - L] = w;
  }
  std::vector<double> weights_d(L);
  for (std::uint32_t i = 0; i < L; ++i) weights_d[i] = to_double(weights[i]);

  struct Partial {
    std::uint64_t failures = 0;
    bool any = false;
    Rational min_kappa, max_kappa;
    std::uint64_t min_count = 0, max_count = 0;
    std::uint64_t min_index = 0, max_index = 0;
    std::vector<std::uint64_t> buckets;  // per edge, plus one overflow
  };
  std::vector<Partial> parts(threads);

  parallel_chunks(count, threads, [&](unsigned tid, std::size_t lo, std::size_t hi) {
    Partial& part = parts[tid];
    part.buckets.assign(edges.size() + 1, 0);

    std::vector<std::uint32_t> assignment =
        unrank_assignment(dist.counts(), L, BigInt(static_cast<unsigned long>(lo)));
    CodingTables tables;
    SymbolSpread spread(dist.table_exponent(), assignment);

    const std::size_t w = static_cast<std::size_t>(L) + 1;
    std::vector<std::int64_t> aug(exact ? L * w : 0);
    std::vector<Rational> xq(exact ? L : 0);
    std::optional<SpreadEvaluator> float_eval;
    if (!exact) float_eval.emplace(dist);

    for (std::size_t idx = lo; idx < hi; ++idx) {
      for (std::uint32_t i = 0; i < L; ++i) spread.set_symbol(L + i, assignment[i]);

      bool singular = false;
      Rational kappa;
      double kappa_d = 0;
      if (exact) {
        tables.rebuild(dist, spread);
        std::fill(aug.begin(), aug.end(), 0);
        for (std::uint32_t i = 0; i < L; ++i) aug[static_cast<std::size_t>(i) * w + i] = -denom;
        for (std::uint32_t x = L; x < 2 * L; ++x)
          for (std::size_t s = 0; s < n; ++s)
            aug[static_cast<std::size_t>(tables.next_state(s, x) - L) * w + (x - L)] +=
                scaled[s];
        for (std::uint32_t j = 0; j < L; ++j)
          aug[static_cast<std::size_t>(L - 1) * w + j] = denom;
        aug[static_cast<std::size_t>(L - 1) * w + L] = denom;
        if (!markov::detail::solve_augmented_i64(L, aug.data(), xq.data())) {
          singular = true;
        } else {
          kappa = 0;
          for (std::uint32_t i = 0; i < L; ++i) kappa += weights[i] * xq[i];
          kappa.canonicalize();
          kappa_d = to_double(kappa);
        }
      } else {
        const double dh = float_eval->delta_h(spread);
        if (dh == kInf) {
          singular = true;
        } else {
          kappa_d = dh + dist.entropy_bits();
          kappa = Rational(kappa_d);  // float mode: approximate bucketing
        }
      }

      if (singular) {
        ++part.failures;
      } else {
        if (!part.any || kappa < part.min_kappa) {
          part.min_kappa = kappa;
          part.min_count = 1;
          part.min_index = idx;
        } else if (kappa == part.min_kappa) {
          ++part.min_count;
        }
        if (!part.any || kappa > part.max_kappa) {
          part.max_kappa = kappa;
          part.max_count = 1;
          part.max_index = idx;
        } else if (kappa == part.max_kappa) {
          ++part.max_count;
        }
        part.any = true;
        std::size_t b = edges.size();
        for (std::size_t e = 0; e < edges.size(); ++e)
          if (kappa <= edges[e]) {
            b = e;
            break;
          }
        ++part.buckets[b];
      }

      if (idx + 1 < hi) std::next_permutation(assignment.begin(), assignment.end());
    }
  });

  SpreadHistogram hist;
  hist.total = total;
  hist.evaluated = count;
  hist.edges = edges;
  hist.bucket_counts.assign(edges.size() + 1, 0);

  bool any = false;
  for (const auto& part : parts) {
    hist.failures += part.failures;
    if (!part.buckets.empty())
      for (std::size_t b = 0; b < hist.bucket_counts.size(); ++b)
        hist.bucket_counts[b] += part.buckets[b];
    if (!part.any) continue;
    if (!any || part.min_kappa < hist.min_kappa) hist.min_kappa = part.min_kappa;
    if (!any || part.max_kappa > hist.max_kappa) hist.max_kappa = part.max_kappa;
    any = true;
  }
  if (!any) throw markov::SingularSystemError("every spread produced a singular system");

  std::uint64_t min_index = UINT64_MAX, max_index = UINT64_MAX;
  for (const auto& part : parts) {
    if (!part.any) continue;
    if (part.min_kappa == hist.min_kappa) {
      hist.min_count += part.min_count;
      min_index = std::min(min_index, part.min_index);
    }
    if (part.max_kappa == hist.max_kappa) {
      hist.max_count += part.max_count;
      max_index = std::min(max_index, part.max_index);
    }
  }

  // keep the exact-min / exact-max classes out of the edge buckets
  for (std::size_t e = 0; e <= edges.size(); ++e) {
    const bool min_here = (e < edges.size() ? hist.min_kappa <= edges[e] : true) &&
                          (e == 0 || hist.min_kappa > edges[e - 1]);
    if (min_here) {
      hist.bucket_counts[e] -= hist.min_count;
      break;
    }
  }
  if (hist.max_kappa != hist.min_kappa) {
    for (std::size_t e = 0; e <= edges.size(); ++e) {
      const bool max_here = (e < edges.size() ? hist.max_kappa <= edges[e] : true) &&
                            (e == 0 || hist.max_kappa > edges[e - 1]);
      if (max_here) {
        hist.bucket_counts[e] -= hist.max_count;
        break;
      }
    }
  }

  hist.min_spread = SymbolSpread(
      dist.table_exponent(),
      unrank_assignment(dist.counts(), L, BigInt(static_cast<unsigned long>(min_index))));
  hist.max_spread = SymbolSpread(
      dist.table_exponent(),
      unrank_assignment(dist.counts(), L, BigInt(static_cast<unsigned long>(max_index))));
  return hist;
}

std::pair<SymbolDistribution, SearchTrace> quantized_search(
    const std::vector<Rational>& probs, std::uint32_t R, QuantizedSearchMode mode,
    const SearchConfig& cfg, std::vector<std::string> symbols) {
  if (mode == QuantizedSearchMode::best_fit) {
    SymbolDistribution dist = quantize(probs, R, std::move(symbols));
    SearchTrace trace = swap_search(dist, cfg);
    return {std::move(dist), std::move(trace)};
  }

  const std::uint32_t L = 1u << R;
  const std::size_t n = probs.size();
  if (n < 2 || n > L) throw std::invalid_argument("alphabet size out of range");

  // tail symbols pinned to 1; others choose alpha_s or alpha_s + 1
  std::vector<std::uint32_t> alpha(n, 0);
  std::vector<bool> tail(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    Rational scaled = probs[s] * L;
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
    if (fl < 1) {
      tail[s] = true;
      alpha[s] = 1;
    } else {
      alpha[s] = static_cast<std::uint32_t>(fl.get_ui());
    }
  }

  std::optional<std::pair<SymbolDistribution, SearchTrace>> best;
  std::vector<std::uint32_t> counts(n);

  // depth-first over the 2^(non-tail) choices with partial-sum pruning
  std::vector<std::uint64_t> min_rest(n + 1, 0), max_rest(n + 1, 0);
  for (std::size_t s = n; s-- > 0;) {
    min_rest[s] = min_rest[s + 1] + alpha[s];
    max_rest[s] = max_rest[s + 1] + alpha[s] + (tail[s] ? 0 : 1);
  }

  auto consider = [&]() {
    SymbolDistribution dist(symbols, probs, R, counts);
    SearchTrace trace = swap_search(dist, cfg);
    if (trace.final_singular) return;
    const bool better =
        !best || trace.report.delta_h < best->second.report.delta_h;
    if (better) best.emplace(std::move(dist), std::move(trace));
  };

  auto rec = [&](auto&& self, std::size_t s, std::uint64_t sum) -> void {
    if (s == n) {
      if (sum == L) consider();
      return;
    }
    for (std::uint32_t extra = 0; extra <= (tail[s] ? 0u : 1u); ++extra) {
      const std::uint64_t c = alpha[s] + extra;
      const std::uint64_t next = sum + c;
      if (next + min_rest[s + 1] > L || next + max_rest[s + 1] < L) continue;
      counts[s] = static_cast<std::uint32_t>(c);
      self(self, s + 1, next);
    }
  };
  rec(rec, 0, 0);

  if (!best) throw std::invalid_argument("no feasible quantized count vector");
  return std::move(*best);
}

}  // namespace anslab::opt
