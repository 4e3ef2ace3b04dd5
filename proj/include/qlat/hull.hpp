#pragma once

// The hull of a 1D model set over Z[sqrt d]: the 2-torus R^2 / Gamma with
// Gamma = {(x, conj x)}, a half-open fundamental parallelepiped for the basis
// v1 = (1, 1), v2 = (sqrt d, -sqrt d), the translation cocycle, the canonical
// cross-section and return times.
//
// Coordinates are exact elements of Q(sqrt d). A point (x, y) in R^2 has basis
// coordinates s = (x + y) / 2 and t = (x - y) / (2 sqrt d).

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qlat/apxgroup.hpp"
#include "qlat/cutproject.hpp"
#include "qlat/error.hpp"
#include "qlat/rational.hpp"
#include "qlat/ring.hpp"

namespace qlat {

struct Vec2 {
  QuadRat x;  // physical
  QuadRat y;  // internal
};

inline Vec2 operator+(const Vec2& u, const Vec2& v) { return {u.x + v.x, u.y + v.y}; }

inline Vec2 lattice_vector(const QuadInt& g) { return {to_rat(g), to_rat(g.conj())}; }

inline Vec2 physical(const QuadRat& t) { return {t, QuadRat::zero(t.d())}; }

struct HullPoint {
  QuadRat s;  // in [0, 1)
  QuadRat t;  // in [0, 1)

  long d() const { return s.d(); }

  Vec2 vector() const {
    QuadRat root = QuadRat::root(d());
    return {s + t * root, s - t * root};
  }

  friend bool operator==(const HullPoint&, const HullPoint&) = default;
};

struct Section {
  HullPoint rep;
  QuadInt element;  // v = rep + (element, conj element)
};

inline std::pair<QuadRat, QuadRat> basis_coordinates(const Vec2& v) {
  const long d = v.x.d();
  QuadRat s = (v.x + v.y) * Rational(1, 2);
  // (x - y) / (2 sqrt d) = (p + q sqrt d) / (2 sqrt d) = q/2 + (p / 2d) sqrt d
  QuadRat diff = v.x - v.y;
  QuadRat t(diff.b() / 2, diff.a() / (2 * d), d);
  return {std::move(s), std::move(t)};
}

inline Section section(const Vec2& v) {
  if (v.x.d() != v.y.d()) throw RingMismatch(v.x.d(), v.y.d());
  const long d = v.x.d();
  auto [s, t] = basis_coordinates(v);
  Integer fs = floor(s);
  Integer ft = floor(t);
  Section out{{s - QuadRat::scalar(Rational(fs), d), t - QuadRat::scalar(Rational(ft), d)}, QuadInt(fs, ft, d)};
  return out;
}

inline HullPoint hull_origin(long d) { return {QuadRat::zero(d), QuadRat::zero(d)}; }

// (t, 0) + X as a hull point.
inline HullPoint translate(const HullPoint& X, const QuadRat& t) { return section(X.vector() + physical(t)).rep; }

// The lattice element gamma with s((t, 0) + X) = (t, 0) + X - gamma.
inline QuadInt cocycle_alpha(const QuadRat& t, const HullPoint& X) { return section(X.vector() + physical(t)).element; }

// alpha(t + t', X) == alpha(t, (t', 0) + X) + alpha(t', X).
inline bool cocycle_identity_holds(const QuadRat& t, const QuadRat& t2, const HullPoint& X) {
  return cocycle_alpha(t + t2, X) == cocycle_alpha(t, translate(X, t2)) + cocycle_alpha(t2, X);
}

// section(v + gamma) == section(v) for gamma in Gamma.
inline bool section_invariant(const Vec2& v, const QuadInt& gamma) {
  return section(v + lattice_vector(gamma)).rep == section(v).rep;
}

struct CrossSectionPoint {
  HullPoint point;
  QuadInt certificate;  // g with (g, conj g) + X at physical coordinate 0 inside the strip
  QuadRat internal;     // internal coordinate of that translate, in [-W0, W0]
};

// X lies in T_{0,W0} iff some Gamma-translate of X has physical coordinate 0
// and internal coordinate in [-W0, W0]. With X = (x, y) that translate is
// (x, y) - (x, conj x), which forces x in Z[sqrt d].
inline std::optional<CrossSectionPoint> cross_section(const HullPoint& X, const Rational& W0) {
  if (sgn(W0) <= 0) throw PreconditionError("cross_section: W0 must be positive");
  Vec2 v = X.vector();
  if (v.x.a().get_den() != 1 || v.x.b().get_den() != 1) return std::nullopt;
  QuadInt g(v.x.a().get_num(), v.x.b().get_num(), X.d());
  QuadRat internal = v.y - to_rat(g.conj());
  if (!abs_le(internal, W0)) return std::nullopt;
  return CrossSectionPoint{X, -g, std::move(internal)};
}

// Hull point whose configuration has a point at 0 with internal coordinate y.
inline HullPoint cross_section_point(const QuadRat& y) { return section({QuadRat::zero(y.d()), y}).rep; }

// A subset of T_{0,W0}, described by closed intervals of internal
// coordinates. Single sampled points are degenerate intervals.
struct CrossSectionSet {
  long d = 2;
  Rational W0{1};
  std::vector<std::pair<QuadRat, QuadRat>> intervals;

  static CrossSectionSet full(long d, const Rational& W0) {
    return {d, W0, {{QuadRat::scalar(-W0, d), QuadRat::scalar(W0, d)}}};
  }

  static CrossSectionSet from_points(long d, const Rational& W0, std::span<const CrossSectionPoint> pts) {
    CrossSectionSet B{d, W0, {}};
    for (const auto& p : pts) B.intervals.emplace_back(p.internal, p.internal);
    return B;
  }
};

struct ReturnTimes {
  PointPatch times;  // R(B) in the horizon box, as a 1D patch
  CommensurabilityCover times_by_lattice;
  CommensurabilityCover lattice_by_times;
};

// (h, 0) + (0, y) = (h, y) lies in T iff h in Z[sqrt d], and it is then the
// cross-section point with internal coordinate y - conj h. So B meets hB iff
// conj h lies in B - B, i.e. in some I_k - I_l.
inline PointPatch return_times(const CrossSectionSet& B, const Rational& horizon) {
  if (B.intervals.empty()) throw PreconditionError("return_times: empty B");
  const long d = B.d;
  const QuadRat W = QuadRat::scalar(B.W0, d);
  for (const auto& [lo, hi] : B.intervals) {
    if (compare(lo, hi) > 0 || compare(lo, -W) < 0 || compare(hi, W) > 0) {
      throw PreconditionError("return_times: interval outside the cross-section");
    }
  }
  std::vector<QuadInt> hs;
  QuadRat R = QuadRat::scalar(horizon, d);
  for (const auto& Ik : B.intervals) {
    for (const auto& Il : B.intervals) {
      auto part = enumerate_interval(d, -R, R, Ik.first - Il.second, Ik.second - Il.first);
      hs.insert(hs.end(), part.begin(), part.end());
    }
  }
  std::vector<Point> pts;
  pts.reserve(hs.size());
  for (auto& h : hs) pts.push_back(Point{std::move(h)});
  return PointPatch::from_points(d, 1, horizon, std::move(pts));
}

inline ReturnTimes return_times_report(const CrossSectionSet& B, const Rational& horizon) {
  ReturnTimes out;
  out.times = return_times(B, horizon);
  auto ctx = RingContext::make(B.d, B.W0);
  PointPatch lattice = enumerate_model_set(CutProjectScheme::uniform(ctx, 1, B.W0), horizon);
  out.times_by_lattice = commensurability_cover(out.times, lattice);
  out.lattice_by_times = commensurability_cover(lattice, out.times);
  return out;
}

// Physical times X + (t, 0), t in [0, T], inside T_{0,W0}: these are the
// model-set points of [0, T].
inline std::vector<QuadInt> orbit_hits(const Rational& T, long d, const Rational& W0) {
  return enumerate_interval(d, QuadRat::zero(d), QuadRat::scalar(T, d), QuadRat::scalar(-W0, d), QuadRat::scalar(W0, d));
}

struct Equidistribution {
  double fraction = 0.0;  // measured share of [0, T]
  double expected = 0.0;  // 2 eps * density
  double relative_error = 0.0;
};

// Share of t in [0, T] such that the orbit point (t, 0) lies within physical
// distance eps of the cross-section, i.e. within eps of a model-set point.
// The limit is 2 eps * (2 W0) / covol = 2 eps W0 / sqrt d while the boxes
// [lambda - eps, lambda + eps] stay disjoint.
inline Equidistribution equidistribution(const Rational& T, const Rational& eps, long d, const Rational& W0) {
  if (sgn(T) <= 0 || sgn(eps) <= 0) throw PreconditionError("equidistribution: T and eps must be positive");
  auto hits = enumerate_interval(d, QuadRat::scalar(-eps, d), QuadRat::scalar(T + eps, d), QuadRat::scalar(-W0, d),
                                 QuadRat::scalar(W0, d));
  std::vector<double> xs;
  xs.reserve(hits.size());
  for (const auto& h : hits) xs.push_back(to_double(h));
  std::sort(xs.begin(), xs.end());
  const double e = eps.get_d(), Td = T.get_d();
  double covered = 0.0, lo = 0.0, hi = -1.0;
  bool open = false;
  for (double x : xs) {
    double a = std::max(0.0, x - e), b = std::min(Td, x + e);
    if (a >= b) continue;
    if (open && a <= hi) {
      hi = std::max(hi, b);
    } else {
      if (open) covered += hi - lo;
      lo = a;
      hi = b;
      open = true;
    }
  }
  if (open) covered += hi - lo;
  Equidistribution out;
  out.fraction = covered / Td;
  out.expected = 2.0 * e * W0.get_d() / std::sqrt(static_cast<double>(d));
  out.relative_error = std::abs(out.fraction - out.expected) / out.expected;
  return out;
}

// Integral of exp(alpha |x|) over the fundamental parallelepiped with respect
// to Lebesgue measure on R^2, x = s + t sqrt d the physical coordinate:
//   2 sqrt d * (e^alpha - 1) / alpha * (e^{alpha sqrt d} - 1) / (alpha sqrt d).
inline double exponential_moment(double alpha, long d) {
  const double r = std::sqrt(static_cast<double>(d));
  if (alpha == 0.0) return 2.0 * r;
  return 2.0 * r * std::expm1(alpha) / alpha * std::expm1(alpha * r) / (alpha * r);
}

}  // namespace qlat
