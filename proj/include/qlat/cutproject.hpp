#pragma once

// Cut-and-project model sets over Z[sqrt d]^n.
//
// The lattice is Gamma = {(x, conj x) : x in Z[sqrt d]^n} inside R^n x R^n.
// Physical space is the identity embedding, internal space the conjugate
// one, and the window is a closed axis-aligned box. Patches are truncated
// by a closed sup-norm box of half-width R in physical space.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qlat/error.hpp"
#include "qlat/rational.hpp"
#include "qlat/ring.hpp"

namespace qlat {

using Point = std::vector<QuadInt>;

struct PointLess {
  bool operator()(const Point& x, const Point& y) const {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(), LexLess{});
  }
};

inline Point operator+(const Point& x, const Point& y) {
  if (x.size() != y.size()) throw PreconditionError("point dimension mismatch");
  Point r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
  return r;
}

inline Point operator-(const Point& x, const Point& y) {
  if (x.size() != y.size()) throw PreconditionError("point dimension mismatch");
  Point r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

inline Point operator-(const Point& x) {
  Point r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = -x[i];
  return r;
}

inline Point zero_point(long d, int dim) { return Point(static_cast<std::size_t>(dim), QuadInt::zero(d)); }

struct CutProjectScheme {
  RingContext ctx;
  int physical_dim = 1;
  std::vector<Rational> window;  // half-width per coordinate, applied to conjugates

  static CutProjectScheme uniform(RingContext ctx, int dim, const Rational& half_width) {
    if (dim < 1) throw DomainError("scheme dimension must be >= 1");
    if (sgn(half_width) < 0) throw DomainError("window half-width must be >= 0");
    return CutProjectScheme{std::move(ctx), dim, std::vector<Rational>(static_cast<std::size_t>(dim), half_width)};
  }

  void validate() const {
    if (physical_dim < 1) throw DomainError("scheme dimension must be >= 1");
    if (window.size() != static_cast<std::size_t>(physical_dim)) {
      throw DomainError("window must have one half-width per coordinate");
    }
    for (const auto& w : window) {
      if (sgn(w) < 0) throw DomainError("window half-width must be >= 0");
    }
  }
};

// Finite piece of a point set. Points are kept sorted by PointLess and
// distinct; `window` is empty for patches that do not come from a scheme
// (plain lattices, hand-built sets).
struct PointPatch {
  long d = 2;
  int dim = 1;
  Rational radius{0};
  std::vector<Rational> window;
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  bool contains(const Point& p) const {
    return std::binary_search(points.begin(), points.end(), p, PointLess{});
  }

  void normalize() {
    std::sort(points.begin(), points.end(), PointLess{});
    points.erase(std::unique(points.begin(), points.end()), points.end());
  }

  static PointPatch from_points(long d, int dim, Rational radius, std::vector<Point> pts) {
    PointPatch p{d, dim, std::move(radius), {}, std::move(pts)};
    for (const auto& x : p.points) {
      if (x.size() != static_cast<std::size_t>(dim)) throw PreconditionError("point dimension mismatch");
    }
    p.normalize();
    return p;
  }

  // Z^dim inside the box of half-width R (the integer lattice viewed in Z[sqrt d]).
  static PointPatch integer_lattice(long d, int dim, const Integer& R) {
    std::vector<Point> pts;
    std::vector<QuadInt> line;
    for (Integer a = -R; a <= R; ++a) line.push_back(QuadInt::scalar(a, d));
    std::vector<Point> acc{Point{}};
    for (int i = 0; i < dim; ++i) {
      std::vector<Point> next;
      for (const auto& p : acc) {
        for (const auto& x : line) {
          Point q = p;
          q.push_back(x);
          next.push_back(std::move(q));
        }
      }
      acc = std::move(next);
    }
    return from_points(d, dim, Rational(R), std::move(acc));
  }
};

// All x in Z[sqrt d] with phys_lo <= x <= phys_hi and int_lo <= conj x <= int_hi.
//
// With x = a + b sqrt d and x' = a - b sqrt d we have b sqrt d = (x - x')/2,
// so b ranges over [ceil((phys_lo - int_hi) / 2 sqrt d), floor((phys_hi - int_lo) / 2 sqrt d)];
// for fixed b, a is cut out by the intersection
//   [phys_lo - b sqrt d, phys_hi - b sqrt d] and [int_lo + b sqrt d, int_hi + b sqrt d].
// Bounds are exact floors/ceils of elements of Q(sqrt d).
inline std::vector<QuadInt> enumerate_interval(long d, const QuadRat& phys_lo, const QuadRat& phys_hi,
                                               const QuadRat& int_lo, const QuadRat& int_hi) {
  std::vector<QuadInt> out;
  if (compare(phys_lo, phys_hi) > 0 || compare(int_lo, int_hi) > 0) return out;
  // (r) / (2 sqrt d) = (r / 2d) * sqrt d for r in Q(sqrt d).
  auto over_two_root = [d](const QuadRat& r) {
    // (p + q sqrt d) / (2 sqrt d) = q/2 + (p / 2d) sqrt d
    return QuadRat(r.b() / 2, r.a() / (2 * d), d);
  };
  Integer b_lo = ceil(over_two_root(phys_lo - int_hi));
  Integer b_hi = floor(over_two_root(phys_hi - int_lo));
  const QuadRat root = QuadRat::root(d);
  for (Integer b = b_lo; b <= b_hi; ++b) {
    QuadRat shift = root * Rational(b);
    Integer a_lo = ceil(phys_lo - shift);
    Integer t = ceil(int_lo + shift);
    if (t > a_lo) a_lo = t;
    Integer a_hi = floor(phys_hi - shift);
    t = floor(int_hi + shift);
    if (t < a_hi) a_hi = t;
    for (Integer a = a_lo; a <= a_hi; ++a) out.emplace_back(a, b, d);
  }
  std::sort(out.begin(), out.end(), LexLess{});
  return out;
}

inline std::vector<QuadInt> enumerate_symmetric(long d, const Rational& R, const Rational& w) {
  return enumerate_interval(d, QuadRat::scalar(-R, d), QuadRat::scalar(R, d), QuadRat::scalar(-w, d),
                            QuadRat::scalar(w, d));
}

// Cartesian product of per-coordinate lists, in lexicographic order.
inline std::vector<Point> product_points(const std::vector<std::vector<QuadInt>>& lists) {
  std::vector<Point> acc{Point{}};
  for (const auto& list : lists) {
    std::vector<Point> next;
    next.reserve(acc.size() * list.size());
    for (const auto& p : acc) {
      for (const auto& x : list) {
        Point q = p;
        q.push_back(x);
        next.push_back(std::move(q));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

inline PointPatch enumerate_model_set(const CutProjectScheme& scheme, const Rational& R) {
  scheme.validate();
  if (sgn(R) < 0) throw DomainError("enumerate_model_set: negative radius");
  const long d = scheme.ctx.d;
  std::vector<std::vector<QuadInt>> lists;
  for (int i = 0; i < scheme.physical_dim; ++i) {
    lists.push_back(enumerate_symmetric(d, R, scheme.window[static_cast<std::size_t>(i)]));
  }
  PointPatch patch;
  patch.d = d;
  patch.dim = scheme.physical_dim;
  patch.radius = R;
  patch.window = scheme.window;
  patch.points = product_points(lists);
  return patch;
}

inline std::vector<Point> star_map(const PointPatch& patch) {
  std::vector<Point> out;
  out.reserve(patch.size());
  for (const auto& p : patch.points) {
    Point q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[i].conj();
    out.push_back(std::move(q));
  }
  return out;
}

struct GoodModelVerdict {
  bool relatively_compact = true;  // star image inside the window
  bool contains_preimage = true;   // f^{-1}(U) within the radius is in the patch
  std::vector<Point> image_witnesses;
  std::vector<Point> preimage_witnesses;
  std::size_t preimage_checked = 0;

  bool pass() const { return relatively_compact && contains_preimage; }
};

// Checks both good-model axioms for the star map at the scale of the patch.
// Axiom (ii) is checked against an exhaustive scan of the full (a, b) box
// rather than the enumerator that produced the patch.
inline GoodModelVerdict verify_good_model(const PointPatch& patch, const Rational& U, std::size_t max_witnesses = 8) {
  if (patch.window.size() != static_cast<std::size_t>(patch.dim)) {
    throw PreconditionError("verify_good_model: patch carries no window");
  }
  if (sgn(U) <= 0) throw PreconditionError("verify_good_model: U must be positive");
  for (const auto& w : patch.window) {
    if (U > w) throw PreconditionError("verify_good_model: U exceeds the window");
  }
  GoodModelVerdict v;
  for (const auto& p : patch.points) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!abs_le(p[i], patch.window[i], Embedding::conjugate)) {
        v.relatively_compact = false;
        if (v.image_witnesses.size() < max_witnesses) v.image_witnesses.push_back(p);
        break;
      }
    }
  }
  const long d = patch.d;
  // |a| <= (R + U)/2 and |b| sqrt d <= (R + U)/2.
  Rational half = (patch.radius + U) / 2;
  Integer a_max = floor_div(half);
  Integer b_max = isqrt(floor_div(half * half / d));
  std::vector<QuadInt> line;
  for (Integer b = -b_max; b <= b_max; ++b) {
    for (Integer a = -a_max; a <= a_max; ++a) {
      QuadInt x(a, b, d);
      if (abs_le(x, patch.radius, Embedding::identity) && abs_le(x, U, Embedding::conjugate)) {
        line.push_back(std::move(x));
      }
    }
  }
  std::vector<std::vector<QuadInt>> lists(static_cast<std::size_t>(patch.dim), line);
  for (const auto& g : product_points(lists)) {
    ++v.preimage_checked;
    if (!patch.contains(g)) {
      v.contains_preimage = false;
      if (v.preimage_witnesses.size() < max_witnesses) v.preimage_witnesses.push_back(g);
    }
  }
  return v;
}

}  // namespace qlat
