#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace anslab {

// Exact arithmetic is GMP-backed. mpq_class keeps values canonical, so
// operator== is exact value equality.
using Rational = mpq_class;
using BigInt = mpz_class;

inline double to_double(const Rational& q) { return q.get_d(); }

/// mpq_class(num, den) does not canonicalize; this does.
inline Rational make_fraction(long num, unsigned long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Parses "3/16", "0.1875", "1e-3" or "12" into an exact rational.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" (or "num" when den == 1).
std::string rational_string(const Rational& q);

/// lcm of the denominators of a probability vector.
BigInt common_denominator(const std::vector<Rational>& values);

}  // namespace anslab
