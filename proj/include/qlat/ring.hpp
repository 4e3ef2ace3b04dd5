#pragma once

// Exact arithmetic in real quadratic rings Z[sqrt(d)] and fields Q(sqrt(d)).
//
// A value x = a + b*sqrt(d) has two real embeddings: the identity
// a + b*sqrt(d) and the Galois conjugate a - b*sqrt(d). Every order or
// absolute-value decision below is made by sign analysis on (a, b) and one
// integer square comparison a^2 vs d*b^2; nothing goes through floating point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qlat/error.hpp"
#include "qlat/rational.hpp"

namespace qlat {

enum class Embedding { identity, conjugate };

template <class T>
class Quadratic {
 public:
  Quadratic() = default;
  Quadratic(T a, T b, long d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
    if (d_ < 2) throw DomainError("quadratic ring parameter d must be >= 2");
  }

  static Quadratic zero(long d) { return Quadratic(T(0), T(0), d); }
  static Quadratic one(long d) { return Quadratic(T(1), T(0), d); }
  static Quadratic root(long d) { return Quadratic(T(0), T(1), d); }
  static Quadratic scalar(T a, long d) { return Quadratic(std::move(a), T(0), d); }

  const T& a() const { return a_; }
  const T& b() const { return b_; }
  long d() const { return d_; }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }

  Quadratic conj() const { return Quadratic(a_, T(-b_), d_); }

  // x * conj(x); rational (integral for ring elements).
  T norm() const { return T(a_ * a_ - T(d_) * b_ * b_); }

  Quadratic operator-() const { return Quadratic(T(-a_), T(-b_), d_); }

  Quadratic& operator+=(const Quadratic& o) {
    check(o);
    a_ += o.a_;
    b_ += o.b_;
    return *this;
  }
  Quadratic& operator-=(const Quadratic& o) {
    check(o);
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
  }
  Quadratic& operator*=(const Quadratic& o) {
    check(o);
    T na = a_ * o.a_ + T(d_) * b_ * o.b_;
    T nb = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(na);
    b_ = std::move(nb);
    return *this;
  }
  Quadratic& operator*=(const T& s) {
    a_ *= s;
    b_ *= s;
    return *this;
  }

  friend Quadratic operator+(Quadratic x, const Quadratic& y) { return x += y; }
  friend Quadratic operator-(Quadratic x, const Quadratic& y) { return x -= y; }
  friend Quadratic operator*(Quadratic x, const Quadratic& y) { return x *= y; }
  friend Quadratic operator*(Quadratic x, const T& s) { return x *= s; }
  friend Quadratic operator*(const T& s, Quadratic x) { return x *= s; }

  // Component-wise equality; comparing values of different rings is an error.
  friend bool operator==(const Quadratic& x, const Quadratic& y) {
    x.check(y);
    return x.a_ == y.a_ && x.b_ == y.b_;
  }

  void check(const Quadratic& o) const {
    if (d_ != o.d_) throw RingMismatch(d_, o.d_);
  }

  std::string str() const {
    std::string s = to_string(a_);
    s += sgn(b_) < 0 ? "-" : "+";
    s += to_string(T(abs(b_)));
    s += "r" + std::to_string(d_);
    return s;
  }

 private:
  T a_{0};
  T b_{0};
  long d_{0};
};

using QuadInt = Quadratic<Integer>;
using QuadRat = Quadratic<Rational>;

inline QuadRat to_rat(const QuadInt& x) { return QuadRat(Rational(x.a()), Rational(x.b()), x.d()); }

inline QuadInt galois_conj(const QuadInt& x) { return x.conj(); }

inline QuadInt quad_add(const QuadInt& x, const QuadInt& y) { return x + y; }
inline QuadInt quad_mul(const QuadInt& x, const QuadInt& y) { return x * y; }

// Sign of p + q*sqrt(d) under the chosen embedding.
template <class T>
int sign(const Quadratic<T>& x, Embedding e = Embedding::identity) {
  int sa = sgn(x.a());
  int sb = sgn(x.b());
  if (e == Embedding::conjugate) sb = -sb;
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: the larger of a^2 and d*b^2 wins. They are never equal
  // because sqrt(d) is irrational.
  T lhs = x.a() * x.a();
  T rhs = T(x.d()) * x.b() * x.b();
  return cmp(lhs, rhs) > 0 ? sa : sb;
}

// Numeric comparison of the identity embeddings of x and y.
template <class T>
int compare(const Quadratic<T>& x, const Quadratic<T>& y, Embedding e = Embedding::identity) {
  return sign(x - y, e);
}

template <class T>
Quadratic<T> abs_value(const Quadratic<T>& x, Embedding e = Embedding::identity) {
  return sign(x, e) < 0 ? -x : x;
}

// Decides |sigma(x)| <= bound exactly.
template <class T>
bool abs_le(const Quadratic<T>& x, const Rational& bound, Embedding e = Embedding::identity) {
  if (sgn(bound) < 0) throw DomainError("abs_le: negative bound");
  QuadRat v(Rational(x.a()), Rational(x.b()), x.d());
  QuadRat upper = v - QuadRat::scalar(bound, x.d());  // sigma(x) - bound <= 0
  QuadRat lower = -v - QuadRat::scalar(bound, x.d());  // -sigma(x) - bound <= 0
  return sign(upper, e) <= 0 && sign(lower, e) <= 0;
}

// Largest integer n with n <= p + q*sqrt(d) (identity embedding).
inline Integer floor(const QuadRat& x) {
  const Rational& q = x.b();
  Rational approx = x.a();
  if (sgn(q) != 0) {
    // |q|*sqrt(d) = sqrt(num^2 d)/den, bracketed by r/den and (r+1)/den.
    Integer num = abs(q.get_num());
    Integer r = isqrt(num * num * x.d());
    Rational s(r, q.get_den());
    approx += sgn(q) > 0 ? s : Rational(-s);
  }
  Integer n = floor_div(approx) - 1;
  // approx is within 1 of the true value, so at most a few steps.
  while (sign(x - QuadRat::scalar(Rational(n + 1), x.d())) >= 0) ++n;
  while (sign(x - QuadRat::scalar(Rational(n), x.d())) < 0) --n;
  return n;
}

inline Integer ceil(const QuadRat& x) { return -floor(-x); }

// Floating approximation for plots and CSV. Uses x = norm / conj(x) when the
// two terms cancel, so small values of large elements keep their digits.
template <class T>
double to_double(const Quadratic<T>& x, Embedding e = Embedding::identity) {
  auto val = [](const T& v) -> long double { return static_cast<long double>(v.get_d()); };
  long double a = val(x.a());
  long double b = val(x.b());
  if (e == Embedding::conjugate) b = -b;
  long double r = std::sqrt(static_cast<long double>(x.d()));
  long double direct = a + b * r;
  if ((a > 0 && b < 0) || (a < 0 && b > 0)) {
    long double other = a - b * r;
    if (other != 0) return static_cast<double>(val(x.norm()) / other);
  }
  return static_cast<double>(direct);
}

// Lexicographic order on (a, b); this is the canonical container order and
// has nothing to do with the numeric order of the embeddings.
struct LexLess {
  template <class T>
  bool operator()(const Quadratic<T>& x, const Quadratic<T>& y) const {
    int c = cmp(x.a(), y.a());
    if (c != 0) return c < 0;
    return cmp(x.b(), y.b()) < 0;
  }
};

struct NumericLess {
  Embedding embedding = Embedding::identity;
  template <class T>
  bool operator()(const Quadratic<T>& x, const Quadratic<T>& y) const {
    return compare(x, y, embedding) < 0;
  }
};

inline bool is_squarefree(long d) {
  if (d < 1) return false;
  for (long p = 2; p * p <= d; ++p) {
    if (d % (p * p) == 0) return false;
  }
  return true;
}

// Fundamental solution of a^2 - d b^2 = +-1 with a, b > 0 minimal, read off
// the convergents of the continued fraction of sqrt(d). This is the Pell
// unit of Z[sqrt(d)], which for d = 1 mod 4 may differ from the unit of the
// maximal order.
inline QuadInt fundamental_unit(long d, long max_steps = 10'000'000) {
  if (d < 2 || d > 1'000'000) throw DomainError("fundamental_unit: d out of range [2, 1e6]");
  if (!is_squarefree(d)) throw DomainError("fundamental_unit: d is not squarefree");
  const long a0 = static_cast<long>(std::sqrt(static_cast<long double>(d)));
  long root = a0;
  while (root * root > d) --root;
  while ((root + 1) * (root + 1) <= d) ++root;
  long m = 0;
  long q = 1;
  long a = root;
  Integer p_prev = 1, p = root;
  Integer k_prev = 0, k = 1;
  for (long step = 0; step < max_steps; ++step) {
    Integer n = p * p - Integer(d) * k * k;
    if (n == 1 || n == -1) return QuadInt(p, k, d);
    m = a * q - m;
    q = (d - m * m) / q;
    a = (root + m) / q;
    Integer p_next = Integer(a) * p + p_prev;
    Integer k_next = Integer(a) * k + k_prev;
    p_prev = std::move(p);
    p = std::move(p_next);
    k_prev = std::move(k);
    k = std::move(k_next);
  }
  throw ConvergenceError("fundamental_unit: continued fraction exceeded step cap");
}

// Inverse of a unit (norm +-1): conj(u) * norm(u).
inline QuadInt unit_inverse(const QuadInt& u) {
  Integer n = u.norm();
  if (n != 1 && n != -1) throw DomainError("unit_inverse: " + u.str() + " is not a unit");
  return u.conj() * n;
}

// Place data for the PVS set O_{K,S} with K = Q(sqrt d), S = {identity
// place}: an element belongs iff its conjugate has absolute value at most
// window_bound. For elements of Z[sqrt d] the finite-place conditions hold
// automatically.
struct RingContext {
  long d = 2;
  QuadInt fundamental_unit;
  Rational window_bound{1};

  static RingContext make(long d, Rational window = Rational(1)) {
    if (sgn(window) < 0) throw DomainError("RingContext: negative window bound");
    return RingContext{d, qlat::fundamental_unit(d), std::move(window)};
  }

  // alpha = eps^{-1}: |alpha| < 1 at the identity place.
  QuadInt contraction() const { return unit_inverse(fundamental_unit); }
};

inline bool pvs_member(const QuadInt& x, const RingContext& ctx) {
  if (x.d() != ctx.d) throw RingMismatch(x.d(), ctx.d);
  return abs_le(x, ctx.window_bound, Embedding::conjugate);
}

// Polynomial with coefficients in Z[sqrt d], lowest degree first.
struct Polynomial {
  std::vector<QuadInt> coeffs;

  QuadInt operator()(const QuadInt& x) const {
    if (coeffs.empty()) return QuadInt::zero(x.d());
    QuadInt acc = coeffs.back();
    for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  static Polynomial from_integers(std::initializer_list<long> c, long d) {
    Polynomial p;
    for (long v : c) p.coeffs.push_back(QuadInt::scalar(Integer(v), d));
    return p;
  }
};

struct TranslateCover {
  std::vector<QuadInt> images;
  std::vector<QuadInt> translates;  // F, in selection order
  QuadRat target_lo;
  QuadRat target_hi;
  // true iff the windows around conj(F) cover [target_lo, target_hi] without
  // gaps, so the cover extends beyond the sampled images.
  bool covers_interval = false;
};

// Finite F with P(patch) inside F + O_{K,S}. Membership of y - f in O_{K,S}
// only constrains conjugates, so this is an interval cover of conj(P(patch))
// by windows [conj f - w, conj f + w] with centres taken from the images.
// The sweep always extends from the current frontier with the furthest-right
// centre that still touches it, which is optimal in 1D.
inline TranslateCover pvs_product_translates(
    const Polynomial& poly, std::span<const QuadInt> patch, const RingContext& ctx,
    std::optional<std::pair<QuadRat, QuadRat>> target = std::nullopt) {
  if (patch.empty()) throw PreconditionError("pvs_product_translates: empty patch");
  TranslateCover out;
  out.images.reserve(patch.size());
  for (const auto& x : patch) {
    if (x.d() != ctx.d) throw RingMismatch(x.d(), ctx.d);
    out.images.push_back(poly(x));
  }
  std::vector<QuadInt> centres = out.images;
  std::sort(centres.begin(), centres.end(), NumericLess{Embedding::conjugate});
  centres.erase(std::unique(centres.begin(), centres.end()), centres.end());

  const long d = ctx.d;
  const QuadRat w = QuadRat::scalar(ctx.window_bound, d);
  auto conj_val = [](const QuadInt& y) { return to_rat(y.conj()); };

  QuadRat lo = conj_val(centres.front());
  QuadRat hi = conj_val(centres.back());
  if (target) {
    if (compare(target->first, lo) < 0) lo = target->first;
    if (compare(target->second, hi) > 0) hi = target->second;
  }
  out.target_lo = lo;
  out.target_hi = hi;

  std::vector<QuadRat> cv;
  cv.reserve(centres.size());
  for (const auto& c : centres) cv.push_back(conj_val(c));

  bool gap = false;
  QuadRat frontier = lo;
  bool first = true;
  std::size_t scan = 0;  // centres [0, scan) satisfy cv - w <= frontier
  std::size_t next = 0;  // first centre whose conj may still be uncovered
  while (true) {
    while (scan < cv.size() && compare(cv[scan] - w, frontier) <= 0) ++scan;
    // Best centre: largest conj c with c - w <= frontier.
    bool extends = false;
    if (scan > 0) {
      int c = compare(cv[scan - 1] + w, frontier);
      extends = c > 0 || (first && c >= 0);
    }
    if (!extends) {
      gap = true;
      // Skip to the first sample the current cover misses.
      while (next < cv.size() && compare(cv[next], frontier) <= 0) ++next;
      if (next == cv.size()) break;
      frontier = cv[next];
      first = true;
      continue;
    }
    first = false;
    out.translates.push_back(centres[scan - 1]);
    frontier = cv[scan - 1] + w;
    if (compare(frontier, hi) >= 0) break;
  }
  out.covers_interval = !gap;
  return out;
}

// Rational upper bound of |conj(c)| (for window shrinking).
inline Rational conj_abs_upper(const QuadInt& c) {
  constexpr unsigned kBits = 40;
  Integer scale = Integer(1) << kBits;
  Rational root_up(isqrt(Integer(c.d()) * scale * scale) + 1, scale);
  return Rational(abs(c.a())) + Rational(abs(c.b())) * root_up;
}

// For P(0) = 0, a window w' <= ctx.window_bound (halving from it) such that
// every x with |conj x| <= w' has |conj P(x)| <= bound. The triangle bound
// sum |conj c_k| w'^k is used, so the result is sufficient, not sharp.
inline Rational shrink_window_for_image(const Polynomial& poly, const RingContext& ctx,
                                        const Rational& bound) {
  if (poly.coeffs.empty()) return ctx.window_bound;
  if (!poly.coeffs.front().is_zero()) throw PreconditionError("shrink_window: P(0) != 0");
  if (sgn(bound) <= 0) throw DomainError("shrink_window: bound must be positive");
  Rational w = ctx.window_bound;
  for (int iter = 0; iter < 200; ++iter) {
    Rational total = 0;
    Rational pw = 1;
    for (const auto& c : poly.coeffs) {
      total += conj_abs_upper(c) * pw;
      pw *= w;
    }
    if (total <= bound) return w;
    w /= 2;
  }
  throw ConvergenceError("shrink_window: no admissible window found");
}

}  // namespace qlat
