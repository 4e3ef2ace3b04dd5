#pragma once

// Graph-type sets {(g, q(g) + xi)}: a group part g, a base section q, and a
// fiber offset xi from the PVS window patch
//   {xi in Z[sqrt d] : |conj xi| <= window, |xi| <= fiber_radius}.

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "qlat/cutproject.hpp"
#include "qlat/error.hpp"
#include "qlat/ring.hpp"

namespace qlat {

template <class G, class Less>
struct TwistedPatch {
  long d = 2;
  Rational window{1};
  Rational fiber_radius{1};
  std::vector<std::pair<G, QuadInt>> base;   // sorted by Less on G
  std::vector<QuadInt> fiber;                // offset patch, LexLess order
  std::vector<std::pair<G, QuadInt>> pairs;  // materialized (g, q(g) + xi)

  const QuadInt* base_value(const G& g) const {
    auto it = std::lower_bound(base.begin(), base.end(), g,
                               [](const auto& e, const G& key) { return Less{}(e.first, key); });
    if (it == base.end() || Less{}(g, it->first)) return nullptr;
    return &it->second;
  }

  bool offset_in_fiber(const QuadInt& xi) const {
    return abs_le(xi, window, Embedding::conjugate) && abs_le(xi, fiber_radius, Embedding::identity);
  }

  bool contains(const G& g, const QuadInt& x) const {
    const QuadInt* q = base_value(g);
    return q != nullptr && offset_in_fiber(x - *q);
  }

  std::size_t size() const { return pairs.size(); }

  static TwistedPatch build(long d, const Rational& window, const Rational& fiber_radius,
                            std::vector<std::pair<G, QuadInt>> base) {
    if (sgn(window) < 0) throw DomainError("twisted patch: negative window");
    if (sgn(fiber_radius) < 0) throw DomainError("twisted patch: negative fiber radius");
    TwistedPatch t;
    t.d = d;
    t.window = window;
    t.fiber_radius = fiber_radius;
    std::sort(base.begin(), base.end(), [](const auto& x, const auto& y) { return Less{}(x.first, y.first); });
    for (std::size_t i = 1; i < base.size(); ++i) {
      if (!Less{}(base[i - 1].first, base[i].first)) throw PreconditionError("twisted patch: duplicate group element");
    }
    t.base = std::move(base);
    t.fiber = enumerate_symmetric(d, fiber_radius, window);
    t.pairs.reserve(t.base.size() * t.fiber.size());
    for (const auto& [g, q] : t.base) {
      for (const auto& xi : t.fiber) t.pairs.emplace_back(g, q + xi);
    }
    return t;
  }
};

using GraphPatch = TwistedPatch<Point, PointLess>;

// {(gamma, f(gamma) + k) : gamma in patch, k in the K-box fiber patch}.
inline GraphPatch graph_patch(const PointPatch& patch, const std::map<Point, QuadInt, PointLess>& f_values,
                              const Rational& K_halfwidth, const Rational& fiber_radius) {
  if (sgn(K_halfwidth) < 0) throw DomainError("graph_patch: negative K half-width");
  std::vector<std::pair<Point, QuadInt>> base;
  base.reserve(patch.size());
  for (const auto& p : patch.points) {
    auto it = f_values.find(p);
    if (it == f_values.end()) throw IncompleteData("graph_patch: no f-value for a patch point");
    base.emplace_back(p, it->second);
  }
  return GraphPatch::build(patch.d, K_halfwidth, fiber_radius, std::move(base));
}

}  // namespace qlat
