#include "anslab/markov.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "anslab/prng.hpp"
#include "exact_solve.hpp"

namespace anslab::markov {

namespace detail {

namespace {

BigInt to_mpz(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v)
                            : static_cast<unsigned __int128>(v);
  BigInt r = static_cast<unsigned long>(u >> 64);
  r <<= 64;
  r += static_cast<unsigned long>(u & ~0ull);
  return neg ? BigInt(-r) : r;
}

Rational make_rational(__int128 num, __int128 den) {
  Rational q(to_mpz(num), to_mpz(den));
  q.canonicalize();
  return q;
}

// Bareiss step in __int128: a_rj = (a_rj * piv - a_rc * a_cj) / prev.
// Returns false on overflow; division is exact by construction.
bool forward_i128(std::size_t n, std::vector<__int128>& a) {
  const std::size_t w = n + 1;
  __int128 prev = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p * w + c] == 0) ++p;
    if (p == n) return false;  // singular; caller rechecks via mpz
    if (p != c)
      for (std::size_t j = c; j < w; ++j) std::swap(a[p * w + j], a[c * w + j]);
    const __int128 piv = a[c * w + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const __int128 arc = a[r * w + c];
      for (std::size_t j = c + 1; j < w; ++j) {
        __int128 t1, t2;
        if (__builtin_mul_overflow(a[r * w + j], piv, &t1)) return false;
        if (__builtin_mul_overflow(arc, a[c * w + j], &t2)) return false;
        if (__builtin_sub_overflow(t1, t2, &t1)) return false;
        a[r * w + j] = t1 / prev;
      }
      a[r * w + c] = 0;
    }
    prev = piv;
  }
  return true;
}

}  // namespace

bool solve_augmented_mpz(std::size_t n, std::vector<BigInt>& a, Rational* x) {
  const std::size_t w = n + 1;
  BigInt prev = 1, t = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p * w + c] == 0) ++p;
    if (p == n) return false;
    if (p != c)
      for (std::size_t j = c; j < w; ++j)
        mpz_swap(a[p * w + j].get_mpz_t(), a[c * w + j].get_mpz_t());
    const BigInt& piv = a[c * w + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const BigInt arc = a[r * w + c];
      if (arc == 0) {
        for (std::size_t j = c + 1; j < w; ++j) {
          mpz_mul(t.get_mpz_t(), a[r * w + j].get_mpz_t(), piv.get_mpz_t());
          mpz_divexact(a[r * w + j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        }
      } else {
        for (std::size_t j = c + 1; j < w; ++j) {
          mpz_mul(t.get_mpz_t(), a[r * w + j].get_mpz_t(), piv.get_mpz_t());
          mpz_submul(t.get_mpz_t(), arc.get_mpz_t(), a[c * w + j].get_mpz_t());
          mpz_divexact(a[r * w + j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        }
      }
      a[r * w + c] = 0;
    }
    prev = piv;
  }
  for (std::size_t r = n; r-- > 0;) {
    Rational acc(a[r * w + n]);
    for (std::size_t j = r + 1; j < n; ++j) acc -= Rational(a[r * w + j]) * x[j];
    x[r] = acc / Rational(a[r * w + r]);
    x[r].canonicalize();
  }
  return true;
}

bool solve_augmented_i64(std::size_t n, const std::int64_t* a, Rational* x) {
  const std::size_t w = n + 1;
  std::vector<__int128> work(n * w);
  for (std::size_t i = 0; i < n * w; ++i) work[i] = a[i];
  if (forward_i128(n, work)) {
    for (std::size_t r = n; r-- > 0;) {
      Rational acc = make_rational(work[r * w + n], 1);
      for (std::size_t j = r + 1; j < n; ++j)
        acc -= make_rational(work[r * w + j], 1) * x[j];
      x[r] = acc / make_rational(work[r * w + r], 1);
      x[r].canonicalize();
    }
    return true;
  }
  // overflow or apparent singularity: settle it in big integers
  std::vector<BigInt> big(n * w);
  for (std::size_t i = 0; i < n * w; ++i) big[i] = static_cast<long>(a[i]);
  return solve_augmented_mpz(n, big, x);
}

}  // namespace detail

TransitionSystem build_transition_system(const CodingTables& tables,
                                         const SymbolDistribution& dist,
                                         Arithmetic arithmetic) {
  const std::uint32_t L = tables.state_count();
  const std::size_t n = tables.alphabet_size();

  TransitionSystem sys;
  sys.dim_ = L;
  sys.mf_.assign(static_cast<std::size_t>(L) * L, 0.0);
  for (std::uint32_t i = 0; i < L; ++i)
    sys.mf_[static_cast<std::size_t>(i) * L + i] = -1.0;
  for (std::uint32_t x = L; x < 2 * L; ++x)
    for (std::size_t s = 0; s < n; ++s) {
      const std::uint32_t dst = tables.next_state(s, x) - L;
      sys.mf_[static_cast<std::size_t>(dst) * L + (x - L)] += dist.prob_d(s);
    }
  for (std::uint32_t j = 0; j < L; ++j)
    sys.mf_[static_cast<std::size_t>(L - 1) * L + j] = 1.0;

  if (arithmetic == Arithmetic::exact) {
    sys.denom_ = common_denominator(dist.probs());
    std::vector<BigInt> scaled(n);
    for (std::size_t s = 0; s < n; ++s)
      scaled[s] = dist.prob(s).get_num() * (sys.denom_ / dist.prob(s).get_den());
    sys.mz_.assign(static_cast<std::size_t>(L) * L, BigInt(0));
    for (std::uint32_t i = 0; i < L; ++i)
      sys.mz_[static_cast<std::size_t>(i) * L + i] = -sys.denom_;
    for (std::uint32_t x = L; x < 2 * L; ++x)
      for (std::size_t s = 0; s < n; ++s) {
        const std::uint32_t dst = tables.next_state(s, x) - L;
        sys.mz_[static_cast<std::size_t>(dst) * L + (x - L)] += scaled[s];
      }
    for (std::uint32_t j = 0; j < L; ++j)
      sys.mz_[static_cast<std::size_t>(L - 1) * L + j] = sys.denom_;
    sys.exact_built_ = true;
  }
  return sys;
}

Rational TransitionSystem::entry(std::uint32_t row, std::uint32_t col) const {
  if (!exact_built_) throw std::logic_error("transition system built without exact form");
  Rational q(mz_[static_cast<std::size_t>(row) * dim_ + col], denom_);
  q.canonicalize();
  return q;
}

EquilibriumDistribution solve_equilibrium(const TransitionSystem& sys, Arithmetic mode,
                                          std::uint32_t first_state) {
  const std::size_t n = sys.dim();
  EquilibriumDistribution eq;
  eq.mode = mode;
  eq.first_state = first_state;

  if (mode == Arithmetic::exact) {
    if (!sys.exact_built())
      throw std::logic_error("exact solve requested on a float-only transition system");
    const std::size_t w = n + 1;
    eq.probs_exact.resize(n);

    // try the int64/__int128 fast path when all scaled entries fit
    bool small = sys.denominator().fits_slong_p();
    if (small)
      for (const auto& v : sys.scaled_matrix())
        if (!v.fits_slong_p()) {
          small = false;
          break;
        }
    bool ok;
    if (small) {
      std::vector<std::int64_t> a(n * w, 0);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c)
          a[r * w + c] = mpz_get_si(sys.scaled_matrix()[r * n + c].get_mpz_t());
        a[r * w + n] = (r + 1 == n) ? mpz_get_si(sys.denominator().get_mpz_t()) : 0;
      }
      ok = detail::solve_augmented_i64(n, a.data(), eq.probs_exact.data());
    } else {
      std::vector<BigInt> a(n * w);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) a[r * w + c] = sys.scaled_matrix()[r * n + c];
        a[r * w + n] = (r + 1 == n) ? sys.denominator() : BigInt(0);
      }
      ok = detail::solve_augmented_mpz(n, a, eq.probs_exact.data());
    }
    if (!ok) throw SingularSystemError("stationary system is rank-deficient");

    eq.probs.resize(n);
    for (std::size_t i = 0; i < n; ++i) eq.probs[i] = to_double(eq.probs_exact[i]);
    return eq;
  }

  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> m(sys.matrix_d().data(), static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(n));
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    if (std::abs(diag[i]) < 1e-12)
      throw SingularSystemError("stationary system is numerically singular (|pivot| < 1e-12)");

  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  b[static_cast<Eigen::Index>(n - 1)] = 1.0;
  Eigen::VectorXd x = lu.solve(b);

  double sum = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < 0 && x[i] > -1e-9) x[i] = 0;  // numeric noise
    sum += x[i];
  }
  eq.probs.resize(n);
  for (std::size_t i = 0; i < n; ++i) eq.probs[i] = x[static_cast<Eigen::Index>(i)] / sum;
  return eq;
}

EquilibriumDistribution solve_equilibrium(const CodingTables& tables,
                                          const SymbolDistribution& dist, Arithmetic mode) {
  const auto sys = build_transition_system(tables, dist, mode);
  return solve_equilibrium(sys, mode, tables.state_count());
}

RedundancyReport redundancy(const EquilibriumDistribution& eq, const CodingTables& tables,
                            const SymbolDistribution& dist) {
  const std::uint32_t L = tables.state_count();
  const std::size_t n = tables.alphabet_size();

  RedundancyReport rep;
  rep.mode = eq.mode;
  rep.kappa_per_symbol.resize(n);
  rep.entropy = dist.entropy_bits();

  if (eq.mode == Arithmetic::exact) {
    rep.kappa_per_symbol_exact.resize(n);
    Rational kappa = 0;
    for (std::size_t s = 0; s < n; ++s) {
      Rational ks = 0;
      for (std::uint32_t x = L; x < 2 * L; ++x)
        ks += Rational(tables.k_bits(s, x)) * eq.probs_exact[x - L];
      ks.canonicalize();
      rep.kappa_per_symbol_exact[s] = ks;
      rep.kappa_per_symbol[s] = to_double(ks);
      kappa += dist.prob(s) * ks;
    }
    kappa.canonicalize();
    rep.kappa_exact = kappa;
    rep.kappa = to_double(kappa);
  } else {
    double kappa = 0;
    for (std::size_t s = 0; s < n; ++s) {
      double ks = 0;
      for (std::uint32_t x = L; x < 2 * L; ++x)
        ks += tables.k_bits(s, x) * eq.probs[x - L];
      rep.kappa_per_symbol[s] = ks;
      kappa += dist.prob_d(s) * ks;
    }
    rep.kappa = kappa;
  }
  rep.delta_h = rep.kappa - rep.entropy;
  return rep;
}

EquilibriumDistribution simulate_empirical(const CodingTables& tables,
                                           const SymbolDistribution& dist,
                                           std::uint64_t steps, std::uint64_t seed) {
  if (steps < 10000) throw std::invalid_argument("simulation needs at least 10^4 steps");
  const std::uint32_t L = tables.state_count();
  const std::size_t n = tables.alphabet_size();

  std::vector<double> cdf(n);
  double acc = 0;
  for (std::size_t s = 0; s < n; ++s) {
    acc += dist.prob_d(s);
    cdf[s] = acc;
  }
  cdf[n - 1] = 1.0;

  SplitMix64 rng(seed);
  auto draw = [&]() -> std::size_t {
    const double u = rng.next_unit();
    std::size_t lo = 0, hi = n - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (u < cdf[mid])
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  };

  constexpr std::uint64_t kBurnIn = 1000;
  std::uint32_t x = L;
  for (std::uint64_t i = 0; i < kBurnIn; ++i) x = tables.next_state(draw(), x);

  std::vector<std::uint64_t> visits(L, 0);
  for (std::uint64_t i = 0; i < steps; ++i) {
    x = tables.next_state(draw(), x);
    ++visits[x - L];
  }

  EquilibriumDistribution eq;
  eq.mode = Arithmetic::floating;
  eq.first_state = L;
  eq.probs.resize(L);
  for (std::uint32_t i = 0; i < L; ++i)
    eq.probs[i] = static_cast<double>(visits[i]) / static_cast<double>(steps);
  return eq;
}

}  // namespace anslab::markov
