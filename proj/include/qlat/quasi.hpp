#pragma once

// Counting quasimorphisms on the free group F2 = <a, b>, their defects and
// homogenizations, the inhomogeneous bounded cochain complex, quasi-cocycle
// residuals, twisted patches over F2 and the laminarity probe.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qlat/apxgroup.hpp"
#include "qlat/cutproject.hpp"
#include "qlat/error.hpp"
#include "qlat/rational.hpp"
#include "qlat/ring.hpp"
#include "qlat/twisted.hpp"

namespace qlat {

// Letters a, A = a^-1, b, B = b^-1 encoded so that inverse is x ^ 1.
enum Letter : std::uint8_t { kA = 0, kAInv = 1, kB = 2, kBInv = 3 };

inline std::uint8_t inverse_letter(std::uint8_t x) { return x ^ 1u; }

inline char letter_char(std::uint8_t x) { return "aAbB"[x]; }

class FreeWord {
 public:
  FreeWord() = default;

  // Free reduction of an arbitrary letter sequence.
  static FreeWord from_letters(std::span<const std::uint8_t> letters) {
    FreeWord w;
    for (std::uint8_t x : letters) w.push(x);
    return w;
  }

  // "abAB"; "", "e" and "1" denote the identity.
  static FreeWord parse(std::string_view s) {
    FreeWord w;
    if (s == "e" || s == "1") return w;
    for (char c : s) {
      switch (c) {
        case 'a': w.push(kA); break;
        case 'A': w.push(kAInv); break;
        case 'b': w.push(kB); break;
        case 'B': w.push(kBInv); break;
        default: throw ParseError(std::string("invalid letter '") + c + "' in word");
      }
    }
    return w;
  }

  const std::vector<std::uint8_t>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  FreeWord inverse() const {
    FreeWord w;
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(inverse_letter(*it));
    return w;
  }

  friend FreeWord operator*(const FreeWord& x, const FreeWord& y) {
    FreeWord w = x;
    for (std::uint8_t c : y.letters_) w.push(c);
    return w;
  }

  std::string str() const {
    if (letters_.empty()) return "e";
    std::string s;
    for (auto c : letters_) s += letter_char(c);
    return s;
  }

  friend bool operator==(const FreeWord&, const FreeWord&) = default;

  // Shortlex.
  friend std::strong_ordering operator<=>(const FreeWord& x, const FreeWord& y) {
    if (x.size() != y.size()) return x.size() <=> y.size();
    return x.letters_ <=> y.letters_;
  }

  // Exponent sums (a, b); both vanish exactly on the commutator subgroup.
  std::pair<long, long> exponent_sums() const {
    long ea = 0, eb = 0;
    for (auto c : letters_) {
      if (c == kA) ++ea;
      else if (c == kAInv) --ea;
      else if (c == kB) ++eb;
      else --eb;
    }
    return {ea, eb};
  }

 private:
  void push(std::uint8_t x) {
    if (!letters_.empty() && letters_.back() == inverse_letter(x)) letters_.pop_back();
    else letters_.push_back(x);
  }

  std::vector<std::uint8_t> letters_;
};

inline FreeWord reduce(std::string_view s) { return FreeWord::parse(s); }

inline FreeWord commutator(const FreeWord& x, const FreeWord& y) { return x * y * x.inverse() * y.inverse(); }

inline FreeWord power(const FreeWord& g, long n) {
  FreeWord base = n < 0 ? g.inverse() : g;
  long k = n < 0 ? -n : n;
  // g = u c u^-1 with c cyclically reduced, so g^k = u c^k u^-1 is reduced.
  const auto& L = base.letters();
  std::size_t i = 0;
  while (2 * i + 1 < L.size() && L[i] == inverse_letter(L[L.size() - 1 - i])) ++i;
  std::vector<std::uint8_t> out(L.begin(), L.begin() + static_cast<long>(i));
  std::vector<std::uint8_t> core(L.begin() + static_cast<long>(i), L.end() - static_cast<long>(i));
  for (long r = 0; r < k; ++r) out.insert(out.end(), core.begin(), core.end());
  out.insert(out.end(), L.end() - static_cast<long>(i), L.end());
  return k == 0 ? FreeWord{} : FreeWord::from_letters(out);
}

// Length of the cyclically reduced core of g.
inline std::size_t cyclic_core_length(const FreeWord& g) {
  const auto& L = g.letters();
  std::size_t i = 0;
  while (2 * i + 1 < L.size() && L[i] == inverse_letter(L[L.size() - 1 - i])) ++i;
  return L.size() - 2 * i;
}

struct ShortLex {
  bool operator()(const FreeWord& x, const FreeWord& y) const { return x < y; }
};

// All reduced words of length <= L in shortlex order.
inline std::vector<FreeWord> all_reduced_words(int L) {
  std::vector<FreeWord> out{FreeWord{}};
  std::size_t begin = 0;
  for (int len = 1; len <= L; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (std::uint8_t x = 0; x < 4; ++x) {
        const auto& prev = out[i].letters();
        if (!prev.empty() && prev.back() == inverse_letter(x)) continue;
        std::vector<std::uint8_t> l = prev;
        l.push_back(x);
        out.push_back(FreeWord::from_letters(l));
      }
    }
    begin = end;
  }
  return out;
}

// Overlapping occurrences of p as a subword of w.
inline long count_occurrences(const FreeWord& p, const FreeWord& w) {
  const auto& pl = p.letters();
  const auto& wl = w.letters();
  if (pl.empty() || pl.size() > wl.size()) return 0;
  long n = 0;
  for (std::size_t i = 0; i + pl.size() <= wl.size(); ++i) {
    if (std::equal(pl.begin(), pl.end(), wl.begin() + static_cast<long>(i))) ++n;
  }
  return n;
}

struct QuasiTerm {
  FreeWord pattern;
  Rational weight;
};

// h(g) = sum_i w_i (C_{p_i}(g) - C_{p_i^-1}(g)), C counting overlapping
// occurrences in the reduced word.
struct QuasiMorphism {
  std::vector<QuasiTerm> terms;

  static QuasiMorphism counting(std::string_view pattern, Rational weight = Rational(1)) {
    QuasiMorphism h;
    h.add(pattern, std::move(weight));
    return h;
  }

  QuasiMorphism& add(std::string_view pattern, Rational weight) {
    FreeWord p = reduce(pattern);
    if (p.empty()) throw PreconditionError("quasimorphism pattern must be a nonempty reduced word");
    terms.push_back({std::move(p), std::move(weight)});
    return *this;
  }

  std::size_t max_pattern_length() const {
    std::size_t m = 0;
    for (const auto& t : terms) m = std::max(m, t.pattern.size());
    return m;
  }
};

inline Rational qm_eval(const QuasiMorphism& h, const FreeWord& g) {
  Rational v = 0;
  for (const auto& t : h.terms) {
    long c = count_occurrences(t.pattern, g) - count_occurrences(t.pattern.inverse(), g);
    if (c != 0) v += t.weight * c;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Defect.

struct DefectReport {
  Rational value;               // defect at the requested L
  std::vector<Rational> by_length;  // by_length[k] = defect over words of length <= k
  int stabilized_at = 0;        // smallest k with by_length[k] == value
  FreeWord witness_g, witness_h;
};

namespace detail {

// Integer-scaled evaluation tables for the exhaustive defect search. Words
// of length n are coded base 4 with the first letter most significant.
struct ScaledQuasi {
  Integer scale;                     // common denominator of the weights
  std::vector<std::vector<std::uint8_t>> pats;
  std::vector<long> weights;         // signed: +w for p, -w for p^-1
  std::size_t max_len = 0;

  explicit ScaledQuasi(const QuasiMorphism& h) {
    scale = 1;
    for (const auto& t : h.terms) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), t.weight.get_den_mpz_t());
    for (const auto& t : h.terms) {
      Rational s = t.weight * Rational(scale);
      long w = to_long(s.get_num());
      pats.push_back(t.pattern.letters());
      weights.push_back(w);
      pats.push_back(t.pattern.inverse().letters());
      weights.push_back(-w);
      max_len = std::max(max_len, t.pattern.size());
    }
  }

  // Occurrences in buf that start before split and end after it.
  long crossing(const std::uint8_t* buf, std::size_t n, std::size_t split) const {
    long v = 0;
    for (std::size_t k = 0; k < pats.size(); ++k) {
      const auto& p = pats[k];
      std::size_t len = p.size();
      if (len < 2 || len > n) continue;
      std::size_t s0 = split + 1 >= len ? split + 1 - len : 0;
      for (std::size_t s = s0; s < split && s + len <= n; ++s) {
        if (std::equal(p.begin(), p.end(), buf + s)) v += weights[k];
      }
    }
    return v;
  }

  long eval(const std::vector<std::uint8_t>& w) const {
    long v = 0;
    for (std::size_t k = 0; k < pats.size(); ++k) {
      const auto& p = pats[k];
      if (p.size() > w.size()) continue;
      for (std::size_t i = 0; i + p.size() <= w.size(); ++i) {
        if (std::equal(p.begin(), p.end(), w.begin() + static_cast<long>(i))) v += weights[k];
      }
    }
    return v;
  }
};

}  // namespace detail

// max |h(gh) - h(g) - h(h)| over reduced g, h of length <= L, by exhaustive
// enumeration of pairs. With g = g'c and h = c^-1 h' (maximal cancellation)
// the product is g'h', and h(g'h') = h(g') + h(h') + (occurrences across the
// junction), so each pair costs one table lookup per factor plus a short
// junction scan.
inline DefectReport defect(const QuasiMorphism& h, int L) {
  if (L < 0 || L > 10) throw PreconditionError("defect: exhaustive search supports 0 <= L <= 10");
  detail::ScaledQuasi sq(h);
  std::vector<std::size_t> offset(static_cast<std::size_t>(L) + 2, 0);
  for (int n = 0; n <= L; ++n) offset[static_cast<std::size_t>(n) + 1] = offset[static_cast<std::size_t>(n)] + (std::size_t{1} << (2 * n));
  std::vector<long> table(offset.back(), 0);
  struct Coded {
    std::uint32_t code;
    std::uint8_t len;
  };
  std::vector<Coded> words;
  for (const auto& w : all_reduced_words(L)) {
    std::uint32_t code = 0;
    for (auto c : w.letters()) code = (code << 2) | c;
    table[offset[w.size()] + code] = sq.eval(w.letters());
    words.push_back({code, static_cast<std::uint8_t>(w.size())});
  }
  auto letter = [](std::uint32_t code, unsigned len, unsigned i) -> std::uint8_t {
    return static_cast<std::uint8_t>((code >> (2 * (len - 1 - i))) & 3u);
  };
  const std::size_t m = sq.max_len;
  std::vector<long> best(static_cast<std::size_t>(L) + 1, 0);
  std::vector<std::pair<std::size_t, std::size_t>> arg(static_cast<std::size_t>(L) + 1, {0, 0});
  std::uint8_t buf[64];
  for (std::size_t gi = 0; gi < words.size(); ++gi) {
    const auto [cg, lg] = words[gi];
    const long tg = table[offset[lg] + cg];
    for (std::size_t hi = 0; hi < words.size(); ++hi) {
      const auto [ch, lh] = words[hi];
      unsigned k = 0;
      const unsigned kmax = std::min<unsigned>(lg, lh);
      while (k < kmax && letter(cg, lg, lg - 1 - k) == inverse_letter(letter(ch, lh, k))) ++k;
      const unsigned lgp = lg - k;
      const unsigned lhp = lh - k;
      const std::uint32_t cgp = k == lg ? 0 : cg >> (2 * k);
      const std::uint32_t chp = lhp == 0 ? 0 : ch & ((std::uint32_t{1} << (2 * lhp)) - 1);
      long cross = 0;
      if (m >= 2 && lgp > 0 && lhp > 0) {
        std::size_t left = std::min<std::size_t>(m - 1, lgp);
        std::size_t right = std::min<std::size_t>(m - 1, lhp);
        for (std::size_t i = 0; i < left; ++i) buf[i] = letter(cgp, lgp, static_cast<unsigned>(lgp - left + i));
        for (std::size_t i = 0; i < right; ++i) buf[left + i] = letter(chp, lhp, static_cast<unsigned>(i));
        cross = sq.crossing(buf, left + right, left);
      }
      long dv = table[offset[lgp] + cgp] + table[offset[lhp] + chp] + cross - tg - table[offset[lh] + ch];
      if (dv < 0) dv = -dv;
      std::size_t slot = std::max(lg, lh);
      if (dv > best[slot]) {
        best[slot] = dv;
        arg[slot] = {gi, hi};
      }
    }
  }
  DefectReport rep;
  auto all = all_reduced_words(L);
  long run = 0;
  std::pair<std::size_t, std::size_t> run_arg{0, 0};
  for (int n = 0; n <= L; ++n) {
    if (best[static_cast<std::size_t>(n)] > run) {
      run = best[static_cast<std::size_t>(n)];
      run_arg = arg[static_cast<std::size_t>(n)];
    }
    rep.by_length.push_back(Rational(run) / Rational(sq.scale));
  }
  rep.value = rep.by_length.back();
  rep.stabilized_at = L;
  while (rep.stabilized_at > 0 && rep.by_length[static_cast<std::size_t>(rep.stabilized_at) - 1] == rep.value) {
    --rep.stabilized_at;
  }
  rep.witness_g = all[run_arg.first];
  rep.witness_h = all[run_arg.second];
  return rep;
}

// ---------------------------------------------------------------------------
// Homogenization.

struct Homogenized {
  Rational value;
  long N = 0;  // power at which the difference sequence was certified constant
};

// lim h(g^n)/n. For g = u c u^-1 with c cyclically reduced, g^n = u c^n u^-1,
// and once n |c| >= 2m (m the longest pattern) one more factor c adds a fixed
// number of occurrences: the difference sequence h(g^{n+1}) - h(g^n) is then
// constant and equals the limit. N doubles until the certificate holds and
// h(g^{N+1}) - h(g^N) agrees with h(g^{2N+1}) - h(g^{2N}).
inline Homogenized homogenize(const QuasiMorphism& h, const FreeWord& g, long max_N = 1L << 16) {
  if (g.empty()) return {Rational(0), 1};
  const std::size_t core = cyclic_core_length(g);
  const std::size_t m = std::max<std::size_t>(1, h.max_pattern_length());
  auto delta = [&](long n) -> Rational { return qm_eval(h, power(g, n + 1)) - qm_eval(h, power(g, n)); };
  for (long N = 1; N <= max_N; N *= 2) {
    if (static_cast<std::size_t>(N) * core < 2 * m) continue;
    Rational d1 = delta(N);
    if (d1 == delta(2 * N)) return {d1, N};
  }
  throw ConvergenceError("homogenize: difference sequence did not stabilize for " + g.str());
}

// ---------------------------------------------------------------------------
// Bounded cochains with the inhomogeneous coboundary
//   (d c)(g1..g_{n+1}) = g1 . c(g2..g_{n+1})
//                        + sum_{i=1..n} (-1)^i c(g1..g_i g_{i+1}..g_{n+1})
//                        + (-1)^{n+1} c(g1..g_n).

using Tuple = std::vector<FreeWord>;

inline std::string tuple_str(const Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += t[i].str();
  }
  return s + ")";
}

class PartialSupportError : public IncompleteData {
 public:
  explicit PartialSupportError(std::vector<Tuple> missing)
      : IncompleteData(message(missing)), missing_(std::move(missing)) {}
  const std::vector<Tuple>& missing() const { return missing_; }

 private:
  static std::string message(const std::vector<Tuple>& m) {
    std::string s = "coboundary: cochain undefined on";
    for (std::size_t i = 0; i < m.size() && i < 8; ++i) s += " " + tuple_str(m[i]);
    if (m.size() > 8) s += " ... (" + std::to_string(m.size()) + " tuples)";
    return s;
  }
  std::vector<Tuple> missing_;
};

template <class V = Rational>
struct BoundedCochain {
  int degree = 0;
  std::map<Tuple, V> values;
  // Finitely supported cochains read 0 off the support; partially defined
  // ones report the tuple as missing.
  bool finitely_supported = false;

  std::optional<V> at(const Tuple& t) const {
    auto it = values.find(t);
    if (it != values.end()) return it->second;
    if (finitely_supported) return V(0);
    return std::nullopt;
  }

  // Largest absolute value over the stored tuples.
  V sup_norm() const {
    V best(0);
    for (const auto& [t, v] : values) {
      V a = v < 0 ? V(-v) : v;
      if (a > best) best = a;
    }
    return best;
  }
};

template <class V>
using CochainAction = std::function<V(const FreeWord&, const V&)>;

template <class V>
CochainAction<V> trivial_action() {
  return [](const FreeWord&, const V& v) { return v; };
}

template <class V>
BoundedCochain<V> coboundary(const BoundedCochain<V>& c, std::span<const Tuple> tuples,
                             const CochainAction<V>& act = trivial_action<V>()) {
  const int n = c.degree;
  BoundedCochain<V> out;
  out.degree = n + 1;
  std::vector<Tuple> missing;
  auto get = [&](const Tuple& t, V& acc, int coeff, const FreeWord* g1) {
    auto v = c.at(t);
    if (!v) {
      missing.push_back(t);
      return;
    }
    V term = g1 ? act(*g1, *v) : *v;
    if (coeff > 0) acc += term;
    else acc -= term;
  };
  for (const auto& t : tuples) {
    if (t.size() != static_cast<std::size_t>(n + 1)) throw PreconditionError("coboundary: tuple has wrong arity");
    V acc(0);
    get(Tuple(t.begin() + 1, t.end()), acc, +1, &t[0]);
    for (int i = 1; i <= n; ++i) {
      Tuple u;
      for (int j = 0; j < n + 1; ++j) {
        if (j == i - 1) u.push_back(t[static_cast<std::size_t>(j)] * t[static_cast<std::size_t>(j) + 1]);
        else if (j != i) u.push_back(t[static_cast<std::size_t>(j)]);
      }
      get(u, acc, i % 2 == 0 ? +1 : -1, nullptr);
    }
    get(Tuple(t.begin(), t.end() - 1), acc, (n + 1) % 2 == 0 ? +1 : -1, nullptr);
    out.values.emplace(t, std::move(acc));
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    throw PartialSupportError(std::move(missing));
  }
  return out;
}

// All k-tuples over the given elements.
inline std::vector<Tuple> all_tuples(std::span<const FreeWord> elements, int k) {
  std::vector<Tuple> acc{Tuple{}};
  for (int i = 0; i < k; ++i) {
    std::vector<Tuple> next;
    for (const auto& t : acc) {
      for (const auto& e : elements) {
        Tuple u = t;
        u.push_back(e);
        next.push_back(std::move(u));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

// h viewed as a 1-cochain on the given words.
inline BoundedCochain<Rational> as_cochain(const QuasiMorphism& h, std::span<const FreeWord> words) {
  BoundedCochain<Rational> c;
  c.degree = 1;
  for (const auto& w : words) c.values.emplace(Tuple{w}, qm_eval(h, w));
  return c;
}

// ---------------------------------------------------------------------------
// Quasi-cocycle residuals with values in Z[sqrt d].

using QuasiCocycle = std::map<FreeWord, QuadInt>;

// Ring-valued lift of an integer-valued h on the given words.
inline QuasiCocycle lift(const QuasiMorphism& h, std::span<const FreeWord> words, long d) {
  QuasiCocycle q;
  for (const auto& w : words) {
    Rational v = qm_eval(h, w);
    if (v.get_den() != 1) throw DomainError("lift: h(" + w.str() + ") is not an integer");
    q.emplace(w, QuadInt::scalar(v.get_num(), d));
  }
  return q;
}

struct ResidualViolation {
  FreeWord g1, g2;
  QuadInt residual;
};

struct ResidualReport {
  Rational bound;
  std::size_t checked = 0;
  std::vector<ResidualViolation> violations;
  QuadInt worst;  // residual with the largest |conj|

  bool pass() const { return violations.empty(); }
};

using RingAction = std::function<QuadInt(const FreeWord&, const QuadInt&)>;

// Checks q(g1 g2) - g1 . q(g2) - q(g1) against the window of the power set
// L_A^{2(m1+m2)}: |conj r| <= 2 (m1 + m2) w, or an explicit bound. Samples
// must satisfy |g1| <= m1 and |g2| <= m2.
inline ResidualReport qc_residual_check(const QuasiCocycle& q, const PointPatch& fiber_patch, int m1, int m2,
                                        std::span<const std::pair<FreeWord, FreeWord>> samples,
                                        std::optional<Rational> bound = std::nullopt,
                                        const RingAction& act = nullptr) {
  if (fiber_patch.window.empty()) throw PreconditionError("qc_residual_check: fiber patch carries no window");
  ResidualReport rep;
  rep.bound = bound.value_or(Rational(2 * (m1 + m2)) * fiber_patch.window[0]);
  rep.worst = QuadInt::zero(fiber_patch.d);
  auto value = [&](const FreeWord& g) -> const QuadInt& {
    auto it = q.find(g);
    if (it == q.end()) throw IncompleteData("qc_residual_check: q undefined on " + g.str());
    return it->second;
  };
  for (const auto& [g1, g2] : samples) {
    if (g1.size() > static_cast<std::size_t>(m1) || g2.size() > static_cast<std::size_t>(m2)) {
      throw PreconditionError("qc_residual_check: sample exceeds (m1, m2)");
    }
    QuadInt acted = act ? act(g1, value(g2)) : value(g2);
    QuadInt r = value(g1 * g2) - acted - value(g1);
    ++rep.checked;
    if (compare(abs_value(r, Embedding::conjugate), abs_value(rep.worst, Embedding::conjugate),
                Embedding::conjugate) > 0) {
      rep.worst = r;
    }
    if (!abs_le(r, rep.bound, Embedding::conjugate)) rep.violations.push_back({g1, g2, r});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Twisted patches over F2.

using FreeTwistedPatch = TwistedPatch<FreeWord, ShortLex>;

inline FreeTwistedPatch build_twisted(const QuasiCocycle& q, std::span<const FreeWord> group, long d,
                                      const Rational& window, const Rational& fiber_radius) {
  if (sgn(window) < 0) throw DomainError("build_twisted: negative window");
  std::vector<std::pair<FreeWord, QuadInt>> base;
  base.reserve(group.size());
  for (const auto& g : group) {
    auto it = q.find(g);
    if (it == q.end()) throw IncompleteData("build_twisted: q undefined on " + g.str());
    base.emplace_back(g, it->second);
  }
  return FreeTwistedPatch::build(d, window, fiber_radius, std::move(base));
}

inline PatchReport twisted_covering_constant(const FreeTwistedPatch& tp, int core_length) {
  auto core = all_reduced_words(core_length);
  return twisted_covering_constant(tp, core, [](const FreeWord& x, const FreeWord& y) { return x * y; });
}

struct SplittingSection {
  bool found = false;
  QuadInt image_a, image_b;  // sigma(a), sigma(b); sigma is the homomorphism they generate
  std::size_t checked = 0;
};

// Looks for a homomorphism sigma: F2 -> Z[sqrt d] whose graph lies in the
// twisted patch on every group element of the patch, i.e. an exact section
// g -> (g, sigma(g)) of the projection to the group part. Values sigma(a),
// sigma(b) range over the patch fibers above a and b.
inline SplittingSection splitting_section(const FreeTwistedPatch& tp) {
  SplittingSection out;
  const FreeWord a = reduce("a"), b = reduce("b");
  const QuadInt* qa = tp.base_value(a);
  const QuadInt* qb = tp.base_value(b);
  if (!qa || !qb) throw PreconditionError("splitting_section: patch must contain a and b");
  for (const auto& xa : tp.fiber) {
    for (const auto& xb : tp.fiber) {
      QuadInt sa = *qa + xa, sb = *qb + xb;
      bool ok = true;
      for (const auto& [g, qg] : tp.base) {
        ++out.checked;
        auto [ea, eb] = g.exponent_sums();
        QuadInt sg = sa * Integer(ea) + sb * Integer(eb);
        if (!tp.offset_in_fiber(sg - qg)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        out.found = true;
        out.image_a = sa;
        out.image_b = sb;
        return out;
      }
    }
  }
  return out;
}

// h(g^n) for n = 1..n_max: the fiber value of the base section along powers.
inline std::vector<Rational> power_values(const QuasiMorphism& h, const FreeWord& g, long n_max) {
  std::vector<Rational> out;
  for (long n = 1; n <= n_max; ++n) out.push_back(qm_eval(h, power(g, n)));
  return out;
}

// ---------------------------------------------------------------------------
// Laminarity probe.

enum class Verdict { laminar_consistent, non_laminar, inconclusive };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::laminar_consistent: return "LAMINAR-CONSISTENT";
    case Verdict::non_laminar: return "NON-LAMINAR";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

struct ProbeCertificate {
  FreeWord element;
  std::optional<Rational> homogenized;  // empty when homogenization did not converge
};

struct ProbeReport {
  Verdict verdict = Verdict::laminar_consistent;
  std::vector<ProbeCertificate> certificates;
};

// Homomorphisms to an abelian group vanish on commutators, and so does
// anything at bounded distance once homogenized. A nonzero homogenized value
// on a commutator therefore certifies that h is not at bounded distance from a
// homomorphism: its twisted patch is not laminar. All-zero values are only
// consistent with laminarity.
inline ProbeReport laminarity_probe(const QuasiMorphism& h, std::span<const FreeWord> tests) {
  if (tests.empty()) throw PreconditionError("laminarity_probe: empty test set");
  ProbeReport rep;
  bool any_failed = false;
  for (const auto& t : tests) {
    auto [ea, eb] = t.exponent_sums();
    if (ea != 0 || eb != 0) throw PreconditionError("laminarity_probe: " + t.str() + " is not in [F2, F2]");
    try {
      auto hv = homogenize(h, t);
      rep.certificates.push_back({t, hv.value});
      if (sgn(hv.value) != 0) rep.verdict = Verdict::non_laminar;
    } catch (const ConvergenceError&) {
      rep.certificates.push_back({t, std::nullopt});
      any_failed = true;
    }
  }
  if (rep.verdict != Verdict::non_laminar && any_failed) rep.verdict = Verdict::inconclusive;
  return rep;
}

}  // namespace qlat
