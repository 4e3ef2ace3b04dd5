#pragma once

// Finite-patch statistics for approximate subgroups: symmetry, uniform
// discreteness, relative denseness, the covering constant K with
// core(L + L) inside F + L, commensurability covers, and efficient-generation
// chains in the PVS set.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qlat/cutproject.hpp"
#include "qlat/error.hpp"
#include "qlat/ring.hpp"
#include "qlat/twisted.hpp"

namespace qlat {

// ---------------------------------------------------------------------------
// Greedy set cover.

struct CoverResult {
  std::vector<std::size_t> chosen;  // candidate indices in selection order
  std::size_t targets = 0;
  std::size_t uncovered = 0;  // targets no candidate covers

  bool complete() const { return uncovered == 0; }
};

// Classic greedy: repeatedly take the candidate covering the most uncovered
// targets. Ties go to the smallest candidate index, so callers pass
// candidates already sorted by their tie-break order.
template <class Covers>
CoverResult greedy_cover(std::size_t n_targets, std::size_t n_candidates, Covers&& covers) {
  std::vector<std::vector<std::size_t>> by_candidate(n_candidates);
  std::vector<std::vector<std::size_t>> by_target(n_targets);
  for (std::size_t c = 0; c < n_candidates; ++c) {
    for (std::size_t t = 0; t < n_targets; ++t) {
      if (covers(c, t)) {
        by_candidate[c].push_back(t);
        by_target[t].push_back(c);
      }
    }
  }
  CoverResult out;
  out.targets = n_targets;
  std::vector<std::size_t> gain(n_candidates);
  for (std::size_t c = 0; c < n_candidates; ++c) gain[c] = by_candidate[c].size();
  std::vector<char> covered(n_targets, 0);
  for (std::size_t t = 0; t < n_targets; ++t) {
    if (by_target[t].empty()) {
      covered[t] = 1;
      ++out.uncovered;
    }
  }
  std::size_t remaining = n_targets - out.uncovered;
  while (remaining > 0) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < n_candidates; ++c) {
      if (gain[c] > gain[best]) best = c;
    }
    out.chosen.push_back(best);
    for (std::size_t t : by_candidate[best]) {
      if (covered[t]) continue;
      covered[t] = 1;
      --remaining;
      for (std::size_t c : by_target[t]) --gain[c];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Basic patch statistics.

inline bool check_symmetry(const PointPatch& patch) {
  for (const auto& p : patch.points) {
    if (!patch.contains(-p)) return false;
  }
  return true;
}

// Sup-norm distance, exact.
inline QuadInt sup_distance(const Point& x, const Point& y) {
  QuadInt best = QuadInt::zero(x.front().d());
  for (std::size_t i = 0; i < x.size(); ++i) {
    QuadInt v = abs_value(x[i] - y[i]);
    if (compare(v, best) > 0) best = std::move(v);
  }
  return best;
}

// Sup-norm of a point.
inline QuadInt sup_norm(const Point& x) { return sup_distance(x, zero_point(x.front().d(), static_cast<int>(x.size()))); }

struct GapResult {
  QuadInt value;
  Point first;
  Point second;
};

// Minimum sup-norm distance between distinct points: sort by the first
// coordinate, then sweep forward only while that coordinate alone is closer
// than the best distance found so far.
inline GapResult min_gap(const PointPatch& patch) {
  if (patch.size() < 2) throw PreconditionError("min_gap: need at least two points");
  std::vector<Point> pts = patch.points;
  std::sort(pts.begin(), pts.end(), [](const Point& x, const Point& y) { return compare(x[0], y[0]) < 0; });
  std::optional<GapResult> best;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      QuadInt dx = pts[j][0] - pts[i][0];
      if (best && compare(dx, best->value) >= 0) break;
      QuadInt dist = sup_distance(pts[i], pts[j]);
      if (dist.is_zero()) throw PreconditionError("min_gap: duplicate point in patch");
      if (!best || compare(dist, best->value) < 0) best = GapResult{dist, pts[i], pts[j]};
    }
  }
  return *best;
}

struct CoveringRadius {
  std::optional<QuadRat> exact;  // available for dim == 1
  double value = 0.0;
};

// dim 1: largest gap between consecutive points of the inner box
// [-(R - margin), R - margin], counting the distance from each box edge to the
// nearest point. dim 2: largest sup-distance from a grid point of the inner box
// to the patch, on a grid with `grid` cells per side.
inline CoveringRadius covering_radius(const PointPatch& patch, const Rational& margin, int grid = 64) {
  if (patch.empty()) throw PreconditionError("covering_radius: empty patch");
  Rational inner = patch.radius - margin;
  if (sgn(inner) < 0) throw PreconditionError("covering_radius: margin exceeds radius");
  const long d = patch.d;
  CoveringRadius out;
  if (patch.dim == 1) {
    QuadRat lo = QuadRat::scalar(-inner, d);
    QuadRat hi = QuadRat::scalar(inner, d);
    std::vector<QuadRat> xs;
    for (const auto& p : patch.points) {
      QuadRat x = to_rat(p[0]);
      if (compare(x, lo) >= 0 && compare(x, hi) <= 0) xs.push_back(std::move(x));
    }
    std::sort(xs.begin(), xs.end(), NumericLess{});
    QuadRat best = hi - lo;
    if (!xs.empty()) {
      best = xs.front() - lo;
      QuadRat tail = hi - xs.back();
      if (compare(tail, best) > 0) best = tail;
      for (std::size_t i = 1; i < xs.size(); ++i) {
        QuadRat g = xs[i] - xs[i - 1];
        if (compare(g, best) > 0) best = g;
      }
    }
    out.value = to_double(best);
    out.exact = std::move(best);
    return out;
  }
  if (patch.dim != 2) throw PreconditionError("covering_radius: only dim 1 and 2 are supported");
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : patch.points) pts.emplace_back(to_double(p[0]), to_double(p[1]));
  std::sort(pts.begin(), pts.end());
  const double r = inner.get_d();
  double worst = 0.0;
  for (int i = 0; i <= grid; ++i) {
    double gx = -r + 2.0 * r * i / grid;
    for (int j = 0; j <= grid; ++j) {
      double gy = -r + 2.0 * r * j / grid;
      double best = std::numeric_limits<double>::infinity();
      auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(gx, -std::numeric_limits<double>::infinity()));
      for (auto k = it; k != pts.end() && k->first - gx < best; ++k) {
        best = std::min(best, std::max(std::abs(k->first - gx), std::abs(k->second - gy)));
      }
      for (auto k = it; k != pts.begin();) {
        --k;
        if (gx - k->first >= best) break;
        best = std::min(best, std::max(std::abs(k->first - gx), std::abs(k->second - gy)));
      }
      worst = std::max(worst, best);
    }
  }
  out.value = worst;
  return out;
}

// ---------------------------------------------------------------------------
// Covering constants.

// Points of the patch inside the sup-norm box of half-width r.
inline std::vector<Point> core_points(const PointPatch& patch, const Rational& r) {
  std::vector<Point> out;
  for (const auto& p : patch.points) {
    bool inside = true;
    for (const auto& x : p) {
      if (!abs_le(x, r)) {
        inside = false;
        break;
      }
    }
    if (inside) out.push_back(p);
  }
  return out;
}

struct PatchReport {
  std::size_t K_constant = 0;
  std::vector<Point> translates;
  std::optional<GapResult> min_gap;
  std::optional<CoveringRadius> covering_radius;
  Rational boundary_margin{0};
  std::size_t core_size = 0;
  std::size_t sum_count = 0;
  bool complete = true;  // every core sum is covered by some candidate
};

inline Rational default_margin(const PointPatch& patch) { return patch.radius / 2; }

// Greedy F with (core + core) inside F + patch. Only sums that land in the
// inner box of half-width R - margin are required, i.e. core elements have
// sup-norm at most (R - margin)/2; membership of larger sums cannot be read
// off the truncated patch. Candidates for F are the sums themselves, with
// ties broken towards the lexicographically smallest translate.
inline PatchReport covering_constant_unchecked(const PointPatch& patch, const Rational& margin) {
  if (patch.empty()) throw PreconditionError("covering_constant: empty patch");
  if (sgn(margin) < 0 || margin > patch.radius) throw PreconditionError("covering_constant: bad margin");
  PatchReport rep;
  rep.boundary_margin = margin;
  std::vector<Point> core = core_points(patch, (patch.radius - margin) / 2);
  rep.core_size = core.size();
  std::vector<Point> sums;
  sums.reserve(core.size() * core.size());
  for (std::size_t i = 0; i < core.size(); ++i) {
    for (std::size_t j = i; j < core.size(); ++j) sums.push_back(core[i] + core[j]);
  }
  std::sort(sums.begin(), sums.end(), PointLess{});
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  rep.sum_count = sums.size();
  auto cover = greedy_cover(sums.size(), sums.size(),
                            [&](std::size_t c, std::size_t t) { return patch.contains(sums[t] - sums[c]); });
  rep.K_constant = cover.chosen.size();
  for (std::size_t c : cover.chosen) rep.translates.push_back(sums[c]);
  rep.complete = cover.complete();
  return rep;
}

inline PatchReport covering_constant(const PointPatch& patch, std::optional<Rational> margin = std::nullopt) {
  if (!patch.contains(zero_point(patch.d, patch.dim))) throw PreconditionError("covering_constant: patch lacks 0");
  if (!check_symmetry(patch)) throw PreconditionError("covering_constant: patch is not symmetric");
  return covering_constant_unchecked(patch, margin.value_or(default_margin(patch)));
}

// covering_constant plus the discreteness and denseness statistics.
inline PatchReport analyze_patch(const PointPatch& patch, std::optional<Rational> margin = std::nullopt) {
  Rational m = margin.value_or(default_margin(patch));
  PatchReport rep = covering_constant(patch, m);
  if (patch.size() >= 2) rep.min_gap = min_gap(patch);
  if (patch.dim <= 2) rep.covering_radius = covering_radius(patch, m);
  return rep;
}

struct KProfile {
  std::vector<std::size_t> values;
  bool grows = false;  // strictly increasing across the supplied radii
  bool stable = false;  // all equal
};

inline KProfile k_constant_profile(std::span<const PointPatch> patches) {
  KProfile prof;
  for (const auto& p : patches) prof.values.push_back(covering_constant(p).K_constant);
  prof.stable = std::adjacent_find(prof.values.begin(), prof.values.end(), std::not_equal_to<>()) == prof.values.end();
  prof.grows = prof.values.size() >= 2;
  for (std::size_t i = 1; i < prof.values.size(); ++i) {
    if (prof.values[i] <= prof.values[i - 1]) prof.grows = false;
  }
  return prof;
}

// Covering constant of a twisted patch {(g, q(g) + xi)} over a group with a
// central fiber. Translates are restricted to (e, t): a product
// (g1 g2, x1 + x2) is covered by (e, t) iff x1 + x2 - t - q(g1 g2) lies in
// the fiber patch. Core elements have group part in `core_group` and fiber
// offset of size at most fiber_radius / 2.
template <class G, class Less, class Mul>
PatchReport twisted_covering_constant(const TwistedPatch<G, Less>& tp, const std::vector<G>& core_group, Mul&& mul) {
  PatchReport rep;
  rep.boundary_margin = tp.fiber_radius / 2;
  std::vector<QuadInt> core_fiber;
  for (const auto& xi : tp.fiber) {
    if (abs_le(xi, tp.fiber_radius / 2)) core_fiber.push_back(xi);
  }
  rep.core_size = core_group.size() * core_fiber.size();
  // Offsets r = q(g1) + q(g2) - q(g1 g2) + xi1 + xi2; only distinct r matter.
  std::set<QuadInt, LexLess> defects;
  for (const auto& g1 : core_group) {
    const QuadInt* q1 = tp.base_value(g1);
    if (!q1) throw PreconditionError("twisted_covering_constant: core element outside patch");
    for (const auto& g2 : core_group) {
      const QuadInt* q2 = tp.base_value(g2);
      const QuadInt* q12 = tp.base_value(mul(g1, g2));
      if (!q2) throw PreconditionError("twisted_covering_constant: core element outside patch");
      if (!q12) throw PreconditionError("twisted_covering_constant: core product outside patch");
      defects.insert(*q1 + *q2 - *q12);
    }
  }
  std::set<QuadInt, LexLess> offsets;
  for (const auto& r : defects) {
    for (const auto& x1 : core_fiber) {
      for (const auto& x2 : core_fiber) offsets.insert(r + x1 + x2);
    }
  }
  std::vector<QuadInt> targets(offsets.begin(), offsets.end());
  rep.sum_count = targets.size();
  auto cover = greedy_cover(targets.size(), targets.size(), [&](std::size_t c, std::size_t t) {
    return tp.offset_in_fiber(targets[t] - targets[c]);
  });
  rep.K_constant = cover.chosen.size();
  for (std::size_t c : cover.chosen) rep.translates.push_back(Point{targets[c]});
  rep.complete = cover.complete();
  return rep;
}

// ---------------------------------------------------------------------------
// Commensurability.

struct CommensurabilityCover {
  std::size_t size = 0;
  std::vector<Point> translates;
  bool complete = true;
};

// Greedy F with core(X) inside F + Y, core(X) being the points of X in the
// box of half-width R_X - margin. Candidate translates are the core points
// themselves.
inline CommensurabilityCover commensurability_cover(const PointPatch& X, const PointPatch& Y,
                                                    std::optional<Rational> margin = std::nullopt) {
  if (X.dim != Y.dim) throw PreconditionError("commensurability_cover: dimension mismatch");
  if (X.d != Y.d) throw RingMismatch(X.d, Y.d);
  Rational m = margin.value_or(default_margin(X));
  std::vector<Point> core = core_points(X, X.radius - m);
  auto cover = greedy_cover(core.size(), core.size(),
                            [&](std::size_t c, std::size_t t) { return Y.contains(core[t] - core[c]); });
  CommensurabilityCover out;
  out.size = cover.chosen.size();
  for (std::size_t c : cover.chosen) out.translates.push_back(core[c]);
  out.complete = cover.complete();
  return out;
}

inline PointPatch intersect(const PointPatch& A, const PointPatch& B) {
  if (A.dim != B.dim) throw PreconditionError("intersect: dimension mismatch");
  PointPatch out{A.d, A.dim, std::min(A.radius, B.radius), {}, {}};
  std::set_intersection(A.points.begin(), A.points.end(), B.points.begin(), B.points.end(),
                        std::back_inserter(out.points), PointLess{});
  return out;
}

// Y - Y as a sorted point list.
inline std::vector<Point> difference_set(const PointPatch& Y) {
  std::vector<Point> out;
  out.reserve(Y.size() * Y.size());
  for (const auto& a : Y.points) {
    for (const auto& b : Y.points) out.push_back(a - b);
  }
  std::sort(out.begin(), out.end(), PointLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct IntersectionCover {
  std::size_t cover_y1 = 0;
  std::size_t cover_y2 = 0;
  std::size_t combined = 0;  // |F'|
  bool verified = false;  // core(X) inside F' + ((Y1 - Y1) cap (Y2 - Y2))
};

// From X in F1 + Y1 and X in F2 + Y2, pick one representative of X per
// nonempty cell {x : x - f1 in Y1, x - f2 in Y2}. Then x - rep lies in
// (Y1 - Y1) cap (Y2 - Y2), which gives |F'| <= |F1| |F2|.
inline IntersectionCover intersection_cover(const PointPatch& X, const PointPatch& Y1, const PointPatch& Y2,
                                            std::optional<Rational> margin = std::nullopt) {
  Rational m = margin.value_or(default_margin(X));
  auto c1 = commensurability_cover(X, Y1, m);
  auto c2 = commensurability_cover(X, Y2, m);
  IntersectionCover out;
  out.cover_y1 = c1.size;
  out.cover_y2 = c2.size;
  if (!c1.complete || !c2.complete) return out;
  std::vector<Point> core = core_points(X, X.radius - m);
  auto cell_of = [](const Point& x, const CommensurabilityCover& c, const PointPatch& Y) -> std::size_t {
    for (std::size_t i = 0; i < c.translates.size(); ++i) {
      if (Y.contains(x - c.translates[i])) return i;
    }
    throw Error("intersection_cover: cover does not cover its targets");
  };
  std::map<std::pair<std::size_t, std::size_t>, Point> reps;
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (const auto& x : core) {
    auto key = std::make_pair(cell_of(x, c1, Y1), cell_of(x, c2, Y2));
    reps.try_emplace(key, x);
    cells.push_back(key);
  }
  out.combined = reps.size();
  auto d1 = difference_set(Y1);
  auto d2 = difference_set(Y2);
  out.verified = true;
  for (std::size_t i = 0; i < core.size(); ++i) {
    Point diff = core[i] - reps.at(cells[i]);
    if (!std::binary_search(d1.begin(), d1.end(), diff, PointLess{}) ||
        !std::binary_search(d2.begin(), d2.end(), diff, PointLess{})) {
      out.verified = false;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Efficient generation in the PVS set.

struct ChainStep {
  QuadInt value;  // lambda_{i+1}
  std::size_t translate_index = 0;
  bool seed = false;  // seed: lambda_1 = 0 + seeds[idx]; else lambda_{i+1} = eps (lambda_i + F[idx])
};

struct ChainCertificate {
  QuadInt target;
  std::vector<ChainStep> steps;
  QuadInt contraction;  // alpha = eps^{-1}
  std::size_t length = 0;
};

// Builds chains 0 = l_0, l_1, ..., l_n = u inside O_{K,S} by running the
// contraction u_{-k-1} = alpha u_{-k} - f backwards from u, with f taken
// from a finite F satisfying alpha O_{K,S} inside O_{K,S} + F, until the
// element is within 2 C0, C0 = sup|F| / (1 - |alpha|). The remaining element
// is a seed from the finite set of PVS elements of size at most 2 C0.
class ChainGenerator {
 public:
  explicit ChainGenerator(RingContext ctx, std::optional<Rational> sample_radius = std::nullopt)
      : ctx_(std::move(ctx)) {
    alpha_ = ctx_.contraction();
    expand_ = ctx_.fundamental_unit;
    if (sign(expand_) < 0) {
      expand_ = -expand_;
      alpha_ = -alpha_;
    }
    const long d = ctx_.d;
    QuadRat reach = to_rat(abs_value(alpha_.conj())) * ctx_.window_bound;
    auto target = std::make_pair(-reach, reach);
    Polynomial scale{{QuadInt::zero(d), alpha_}};
    bool ok = false;
    Rational R = sample_radius.value_or(Rational(1));
    for (int attempt = 0; attempt < (sample_radius ? 1 : 24); ++attempt, R *= 2) {
      auto patch = enumerate_symmetric(d, R, ctx_.window_bound);
      if (patch.empty()) continue;
      auto tc = pvs_product_translates(scale, patch, ctx_, target);
      if (tc.covers_interval) {
        translates_ = std::move(tc.translates);
        sample_radius_ = R;
        ok = true;
        break;
      }
    }
    if (!ok) throw Error("ChainGenerator: no finite translate set covers alpha * O_{K,S}");
    std::sort(translates_.begin(), translates_.end(), LexLess{});
    QuadInt m = QuadInt::zero(d);
    for (const auto& f : translates_) {
      QuadInt v = abs_value(f);
      if (compare(v, m) > 0) m = v;
    }
    max_translate_ = m;
    // stop radius 2 C0 = 2 max|f| / (1 - |alpha|), kept exact in Q(sqrt d).
    QuadInt one_minus = QuadInt::one(d) - abs_value(alpha_);
    // 1 / (p + q sqrt d) = (p - q sqrt d) / norm
    Rational n(one_minus.norm());
    QuadRat inv(Rational(one_minus.a()) / n, Rational(-one_minus.b()) / n, d);
    stop_ = to_rat(m) * inv * Rational(2);
    seeds_ = enumerate_interval(d, -stop_, stop_, QuadRat::scalar(-ctx_.window_bound, d),
                                QuadRat::scalar(ctx_.window_bound, d));
  }

  const RingContext& context() const { return ctx_; }
  const QuadInt& contraction() const { return alpha_; }
  const std::vector<QuadInt>& translates() const { return translates_; }
  const std::vector<QuadInt>& seeds() const { return seeds_; }
  const QuadRat& stop_radius() const { return stop_; }
  const Rational& sample_radius() const { return sample_radius_; }

  // C in length <= C log(1 + |u|) + C'.
  double log_constant() const { return 1.0 / std::log(1.0 / std::abs(to_double(alpha_))); }
  double additive_constant() const {
    double c0 = to_double(stop_) / 2;
    return 2.0 + (c0 < 1.0 ? log_constant() * std::log(1.0 / c0) : 0.0);
  }

  ChainCertificate chain(const QuadInt& u) const {
    if (u.d() != ctx_.d) throw RingMismatch(u.d(), ctx_.d);
    if (!pvs_member(u, ctx_)) throw DomainError("efficient_chain: " + u.str() + " is outside the PVS window");
    std::vector<std::size_t> used;
    QuadInt x = u;
    while (compare(to_rat(abs_value(x)), stop_) > 0) {
      QuadInt ax = alpha_ * x;
      std::optional<std::size_t> pick;
      for (std::size_t i = 0; i < translates_.size(); ++i) {
        if (pvs_member(ax - translates_[i], ctx_)) {
          pick = i;
          break;
        }
      }
      if (!pick) throw Error("efficient_chain: translate set too small for " + x.str());
      used.push_back(*pick);
      x = ax - translates_[*pick];
    }
    ChainCertificate cert;
    cert.target = u;
    cert.contraction = alpha_;
    if (!x.is_zero()) {
      auto it = std::lower_bound(seeds_.begin(), seeds_.end(), x, LexLess{});
      if (it == seeds_.end() || !(*it == x)) throw Error("efficient_chain: chain base is not a seed");
      cert.steps.push_back(ChainStep{x, static_cast<std::size_t>(it - seeds_.begin()), true});
    }
    for (auto it = used.rbegin(); it != used.rend(); ++it) {
      x = expand_ * (x + translates_[*it]);
      cert.steps.push_back(ChainStep{x, *it, false});
    }
    cert.length = cert.steps.size();
    if (!(x == u)) throw Error("efficient_chain: reconstruction mismatch");
    return cert;
  }

  // Folds the steps forward from 0 and checks every intermediate value.
  bool replay(const ChainCertificate& cert) const {
    QuadInt x = QuadInt::zero(ctx_.d);
    for (const auto& s : cert.steps) {
      if (s.seed) {
        if (s.translate_index >= seeds_.size()) return false;
        x = x + seeds_[s.translate_index];
      } else {
        if (s.translate_index >= translates_.size()) return false;
        x = expand_ * (x + translates_[s.translate_index]);
      }
      if (!(x == s.value) || !pvs_member(x, ctx_)) return false;
    }
    return cert.steps.size() == cert.length && x == cert.target;
  }

  bool within_bound(const ChainCertificate& cert) const {
    double n = 1.0 + std::abs(to_double(cert.target));
    return static_cast<double>(cert.length) <= log_constant() * std::log(n) + additive_constant();
  }

 private:
  RingContext ctx_;
  QuadInt alpha_;
  QuadInt expand_;
  std::vector<QuadInt> translates_;
  std::vector<QuadInt> seeds_;
  QuadInt max_translate_;
  QuadRat stop_;
  Rational sample_radius_;
};

// One-shot form; enlarges the sample once if a translate is missing.
inline ChainCertificate efficient_chain(const QuadInt& u, const RingContext& ctx) {
  ChainGenerator gen(ctx);
  try {
    return gen.chain(u);
  } catch (const DomainError&) {
    throw;
  } catch (const Error&) {
    ChainGenerator bigger(ctx, gen.sample_radius() * 2);
    return bigger.chain(u);
  }
}

// ---------------------------------------------------------------------------
// Matrix norms.

using Matrix = std::vector<std::vector<Rational>>;

struct MatrixNorms {
  Rational norm;    // sup |m_ij|
  Rational primed;  // ||m - id|| + 1
};

inline MatrixNorms matrix_norms(const Matrix& m) {
  const std::size_t n = m.size();
  for (const auto& row : m) {
    if (row.size() != n) throw PreconditionError("matrix_norms: matrix is not square");
  }
  MatrixNorms out{Rational(0), Rational(0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Rational v = abs(m[i][j]);
      if (v > out.norm) out.norm = v;
      Rational u = abs(m[i][j] - (i == j ? Rational(1) : Rational(0)));
      if (u > out.primed) out.primed = u;
    }
  }
  out.primed += 1;
  return out;
}

inline Matrix matmul(const Matrix& x, const Matrix& y) {
  const std::size_t n = x.size();
  if (y.size() != n) throw PreconditionError("matmul: size mismatch");
  Matrix r(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) r[i][j] += x[i][k] * y[k][j];
    }
  }
  return r;
}

// With the sup-entry norm, ||xy - id|| <= n ||x - id|| ||y - id|| + ||x - id|| + ||y - id||,
// so ||xy||' <= n ||x||' ||y||'. The factor n cannot be dropped for n >= 2.
inline bool primed_submultiplicative(const Matrix& x, const Matrix& y, const Rational& factor = Rational(1)) {
  return matrix_norms(matmul(x, y)).primed <= factor * matrix_norms(x).primed * matrix_norms(y).primed;
}

}  // namespace qlat
