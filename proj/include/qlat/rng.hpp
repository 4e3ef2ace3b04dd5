#pragma once

// xoshiro256** seeded through splitmix64.
//
// splitmix64:  z = (x += 0x9e3779b97f4a7c15);
//              z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
//              z = (z ^ (z >> 27)) * 0x94d049bb133111eb;
//              return z ^ (z >> 31);
// The four state words are four consecutive splitmix64 outputs of the seed.
//
// xoshiro256**: result = rotl(s1 * 5, 7) * 9;
//               t = s1 << 17;
//               s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3;
//               s2 ^= t; s3 = rotl(s3, 45);
//
// Bounded integers use rejection on the top bits (no modulo bias); an integer
// in [0, n) is the first draw r >> k below n, k = 64 - bit_width(n - 1).

#include <array>
#include <bit>
#include <cstdint>
#include <limits>

#include "qlat/cutproject.hpp"
#include "qlat/quasi.hpp"
#include "qlat/rational.hpp"
#include "qlat/ring.hpp"

namespace qlat {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    for (auto& w : s_) w = splitmix64(seed);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const int shift = 64 - std::bit_width(n - 1);
    while (true) {
      std::uint64_t r = (*this)() >> shift;
      if (r < n) return r;
    }
  }

  // Uniform in [lo, hi].
  long uniform(long lo, long hi) {
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform integer in [lo, hi] for big bounds: rejection over 64-bit limbs.
  Integer uniform(const Integer& lo, const Integer& hi) {
    Integer span = hi - lo + 1;
    if (span <= 0) return lo;
    const std::size_t bits = mpz_sizeinbase(span.get_mpz_t(), 2);
    while (true) {
      Integer r = 0;
      std::size_t have = 0;
      while (have < bits) {
        r <<= 64;
        r += static_cast<unsigned long>((*this)());
        have += 64;
      }
      r >>= static_cast<mp_bitcnt_t>(have - bits);
      if (r < span) return lo + r;
    }
  }

 private:
  std::array<std::uint64_t, 4> s_{};
};

// Uniform element of the PVS patch {x : |x| <= R, |conj x| <= w}: b first,
// weighted by the number of admissible a.
inline QuadInt random_pvs_element(Xoshiro256& rng, long d, const Rational& R, const Rational& w) {
  // Rows b have |b| <= (R + w) / (2 sqrt d); enumerate row sizes lazily by
  // rejection against the widest row.
  Rational half = (R + w) / 2;
  Integer b_max = isqrt(floor_div(half * half / d)) + 1;
  const Integer widest = floor_div(2 * std::min(R, w)) + 1;
  const QuadRat root = QuadRat::root(d);
  while (true) {
    Integer b = rng.uniform(-b_max, b_max);
    QuadRat shift = root * Rational(b);
    Integer a_lo = ceil(QuadRat::scalar(-R, d) - shift);
    Integer t = ceil(QuadRat::scalar(-w, d) + shift);
    if (t > a_lo) a_lo = t;
    Integer a_hi = floor(QuadRat::scalar(R, d) - shift);
    t = floor(QuadRat::scalar(w, d) + shift);
    if (t < a_hi) a_hi = t;
    if (a_hi < a_lo) continue;
    Integer k = rng.uniform(Integer(0), widest - 1);
    if (k > a_hi - a_lo) continue;
    return QuadInt(a_lo + k, b, d);
  }
}

// Reduced word of exactly the given length, uniform among reduced words.
inline FreeWord random_word(Xoshiro256& rng, int length) {
  std::vector<std::uint8_t> letters;
  for (int i = 0; i < length; ++i) {
    std::uint8_t x;
    do {
      x = static_cast<std::uint8_t>(rng.below(4));
    } while (!letters.empty() && letters.back() == inverse_letter(x));
    letters.push_back(x);
  }
  return FreeWord::from_letters(letters);
}

// Element of Q(sqrt d) with coefficients p/q, |p| <= span * q, 1 <= q <= max_den.
inline QuadRat random_quadrat(Xoshiro256& rng, long d, long span, long max_den) {
  auto coeff = [&]() {
    long q = rng.uniform(1, max_den);
    long p = rng.uniform(-span * q, span * q);
    Rational r(p, q);
    r.canonicalize();
    return r;
  };
  Rational a = coeff();
  Rational b = coeff();
  return QuadRat(a, b, d);
}

}  // namespace qlat
