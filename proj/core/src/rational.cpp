#include "anslab/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace anslab {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty number");

  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = s[pos] == '-';
    ++pos;
  }
  s = s.substr(pos);
  if (s.empty()) throw std::invalid_argument("bad number: " + std::string(text));

  Rational value;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw std::invalid_argument("bad fraction: " + std::string(text));
    value = Rational(BigInt(num, 10), BigInt(den, 10));
    if (value.get_den() == 0) throw std::invalid_argument("zero denominator");
    value.canonicalize();
  } else {
    // decimal with optional exponent: mantissa * 10^exp
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
      exp10 = std::stol(s.substr(e + 1));
      s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string::npos) {
      digits = s.substr(0, dot) + s.substr(dot + 1);
      exp10 -= static_cast<long>(s.size() - dot - 1);
    } else {
      digits = s;
    }
    if (!all_digits(digits)) throw std::invalid_argument("bad number: " + std::string(text));
    value = Rational(BigInt(digits, 10));
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    if (exp10 < 0)
      value /= Rational(scale);
    else
      value *= Rational(scale);
    value.canonicalize();
  }
  return negative ? Rational(-value) : value;
}

std::string rational_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

BigInt common_denominator(const std::vector<Rational>& values) {
  BigInt l = 1;
  for (const auto& v : values) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den().get_mpz_t());
  return l;
}

}  // namespace anslab
