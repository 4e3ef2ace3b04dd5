#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "qlat/error.hpp"

namespace qlat {

using Integer = mpz_class;
using Rational = mpq_class;

inline int sgn(const Integer& x) { return mpz_sgn(x.get_mpz_t()); }
inline int sgn(const Rational& x) { return mpq_sgn(x.get_mpq_t()); }

inline Integer floor_div(const Rational& x) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

inline Integer ceil_div(const Rational& x) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

inline Integer isqrt(const Integer& x) {
  if (sgn(x) < 0) throw DomainError("isqrt of negative integer");
  Integer r;
  mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
  return r;
}

inline long to_long(const Integer& x) {
  if (!x.fits_slong_p()) throw DomainError("integer does not fit in 64 bits");
  return x.get_si();
}

// Accepts "7", "-3/4" and plain decimals such as "0.125" or "-2.5"; the
// decimal form is converted exactly (no binary rounding).
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto trim = [](std::string& v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.pop_back();
    std::size_t i = 0;
    while (i < v.size() && std::isspace(static_cast<unsigned char>(v[i]))) ++i;
    v.erase(0, i);
  };
  trim(s);
  if (s.empty()) throw ParseError("empty rational");
  Rational r;
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos) throw ParseError("bad rational: " + s);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac = s.size() - dot - 1;
    Integer num;
    if (num.set_str(digits, 10) != 0) throw ParseError("bad rational: " + s);
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
    r = Rational(num, den);
  } else if (r.set_str(s, 10) != 0) {
    throw ParseError("bad rational: " + s);
  }
  if (r.get_den() == 0) throw ParseError("zero denominator: " + s);
  r.canonicalize();
  return r;
}

inline Integer parse_integer(std::string_view text) {
  Integer r;
  if (text.empty() || r.set_str(std::string(text), 10) != 0) {
    throw ParseError("bad integer: " + std::string(text));
  }
  return r;
}

inline std::string to_string(const Integer& x) { return x.get_str(); }
inline std::string to_string(const Rational& x) { return x.get_str(); }

}  // namespace qlat
