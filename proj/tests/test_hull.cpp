#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qlat/hull.hpp"
#include "qlat/rng.hpp"

using namespace qlat;

namespace {

QuadInt q(long a, long b, long d = 2) { return QuadInt(Integer(a), Integer(b), d); }
QuadRat r(long p, long den = 1, long d = 2) { return QuadRat::scalar(Rational(p, den), d); }

Vec2 random_vec(Xoshiro256& rng, long d) { return {random_quadrat(rng, d, 50, 9), random_quadrat(rng, d, 50, 9)}; }

HullPoint random_point(Xoshiro256& rng, long d) { return section(random_vec(rng, d)).rep; }

QuadInt random_ring(Xoshiro256& rng, long d) { return QuadInt(Integer(rng.uniform(-100, 100)), Integer(rng.uniform(-100, 100)), d); }

PointPatch model(long d, const Rational& w, const Rational& R) {
  return enumerate_model_set(CutProjectScheme::uniform(RingContext::make(d, w), 1, w), R);
}

}  // namespace

TEST_CASE("section examples") {
  auto s0 = section({QuadRat::zero(2), QuadRat::zero(2)});
  CHECK(s0.rep == hull_origin(2));
  CHECK(s0.element.is_zero());
  auto s1 = section(lattice_vector(q(1, 0)));
  CHECK(s1.rep == hull_origin(2));
  CHECK(s1.element == q(1, 0));
  auto s2 = section({QuadRat::root(2), -QuadRat::root(2)});
  CHECK(s2.rep == hull_origin(2));
  CHECK(s2.element == q(0, 1));
  // A generic point: rep + lattice vector reproduces v.
  Vec2 v{QuadRat(Rational(7, 3), Rational(-2), 2), QuadRat(Rational(1, 5), Rational(3, 4), 2)};
  auto s = section(v);
  Vec2 back = s.rep.vector() + lattice_vector(s.element);
  CHECK(back.x == v.x);
  CHECK(back.y == v.y);
  CHECK(compare(s.rep.s, QuadRat::zero(2)) >= 0);
  CHECK(compare(s.rep.s, QuadRat::one(2)) < 0);
  CHECK(compare(s.rep.t, QuadRat::zero(2)) >= 0);
  CHECK(compare(s.rep.t, QuadRat::one(2)) < 0);
  CHECK_THROWS_AS(section({QuadRat::zero(2), QuadRat::zero(3)}), RingMismatch);
}

TEST_CASE("section is a reduction into the half-open parallelepiped") {
  Xoshiro256 rng(3);
  for (long d : {2L, 3L, 5L}) {
    for (int i = 0; i < 500; ++i) {
      Vec2 v = random_vec(rng, d);
      auto s = section(v);
      REQUIRE(compare(s.rep.s, QuadRat::zero(d)) >= 0);
      REQUIRE(compare(s.rep.s, QuadRat::one(d)) < 0);
      REQUIRE(compare(s.rep.t, QuadRat::zero(d)) >= 0);
      REQUIRE(compare(s.rep.t, QuadRat::one(d)) < 0);
      Vec2 back = s.rep.vector() + lattice_vector(s.element);
      REQUIRE(back.x == v.x);
      REQUIRE(back.y == v.y);
      // Float check of the basis coordinates.
      double x = to_double(v.x), y = to_double(v.y), rd = std::sqrt(static_cast<double>(d));
      REQUIRE(std::abs(to_double(s.rep.s) + s.element.a().get_d() - (x + y) / 2) < 1e-9);
      REQUIRE(std::abs(to_double(s.rep.t) + s.element.b().get_d() - (x - y) / (2 * rd)) < 1e-9);
    }
  }
}

TEST_CASE("section is invariant under the lattice") {
  Xoshiro256 rng(4);
  for (int i = 0; i < 1000; ++i) {
    long d = i % 2 ? 2 : 3;
    Vec2 v = random_vec(rng, d);
    QuadInt g = random_ring(rng, d);
    REQUIRE(section_invariant(v, g));
    REQUIRE(section(v + lattice_vector(g)).element == section(v).element + g);
  }
}

TEST_CASE("cocycle examples") {
  Xoshiro256 rng(5);
  for (int i = 0; i < 50; ++i) {
    HullPoint X = random_point(rng, 2);
    CHECK(cocycle_alpha(QuadRat::zero(2), X).is_zero());
    CHECK(translate(X, QuadRat::zero(2)) == X);
  }
  // From the origin, (t, 0) has basis coordinates (t/2, t/(2 sqrt 2)); the
  // first wall crossed is s = 1 at t = 2, which is the basis element v1.
  HullPoint O = hull_origin(2);
  CHECK(cocycle_alpha(r(1999, 1000), O).is_zero());
  CHECK(cocycle_alpha(r(2), O) == q(1, 0));
  // The second wall t = 2 sqrt 2 adds v2.
  CHECK(cocycle_alpha(QuadRat(Rational(0), Rational(2), 2) - r(1, 1000), O) == q(1, 0));
  CHECK(cocycle_alpha(QuadRat(Rational(0), Rational(2), 2), O) == q(1, 1));
  // Small negative times cross both walls at the corner.
  CHECK(cocycle_alpha(r(-1, 1000), O) == q(-1, -1));
}

TEST_CASE("cocycle identity holds on random triples") {
  Xoshiro256 rng(6);
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    long d = std::vector<long>{2, 3, 5, 7}[rng.below(4)];
    QuadRat t = random_quadrat(rng, d, 30, 11), t2 = random_quadrat(rng, d, 30, 11);
    HullPoint X = random_point(rng, d);
    if (!cocycle_identity_holds(t, t2, X)) ++failures;
    // The flow is an action.
    if (!(translate(translate(X, t2), t) == translate(X, t + t2))) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("cross-section examples") {
  Rational W0(1);
  auto o = cross_section(hull_origin(2), W0);
  REQUIRE(o);
  CHECK(o->certificate.is_zero());
  CHECK(o->internal == QuadRat::zero(2));
  auto inside = cross_section(cross_section_point(r(1)), W0);
  REQUIRE(inside);
  CHECK(inside->internal == r(1));
  CHECK_FALSE(cross_section(cross_section_point(r(1000001, 1000000)), W0));
  CHECK_FALSE(cross_section(cross_section_point(r(-1000001, 1000000)), W0));
  // Points off the physical lattice are never in the cross-section.
  CHECK_FALSE(cross_section(translate(hull_origin(2), r(1, 2)), W0));
  CHECK_THROWS_AS(cross_section(hull_origin(2), Rational(0)), PreconditionError);
}

TEST_CASE("certificates realise membership") {
  Xoshiro256 rng(7);
  for (int i = 0; i < 300; ++i) {
    QuadRat y = random_quadrat(rng, 2, 1, 17);
    QuadInt g = random_ring(rng, 2);
    HullPoint X = section(Vec2{QuadRat::zero(2), y} + lattice_vector(g)).rep;
    auto c = cross_section(X, Rational(1));
    REQUIRE(c.has_value() == abs_le(y, Rational(1)));
    if (c) {
      Vec2 v = X.vector() + lattice_vector(c->certificate);
      REQUIRE(v.x.is_zero());
      REQUIRE(v.y == c->internal);
      REQUIRE(c->internal == y);
    }
  }
}

TEST_CASE("orbit hits of the origin are the model set") {
  Rational T(1000);
  for (long d : {2L, 3L}) {
    auto hits = orbit_hits(T, d, Rational(1));
    auto patch = model(d, Rational(1), T);
    std::vector<QuadInt> expect;
    for (const auto& p : patch.points) {
      if (sign(p[0]) >= 0) expect.push_back(p[0]);
    }
    REQUIRE(hits == expect);
    HullPoint O = hull_origin(d);
    for (const auto& h : hits) REQUIRE(cross_section(translate(O, to_rat(h)), Rational(1)));
    // Times between consecutive hits are misses.
    std::vector<QuadInt> sorted = hits;
    std::sort(sorted.begin(), sorted.end(), NumericLess{});
    for (std::size_t i = 1; i < sorted.size() && i < 200; ++i) {
      QuadRat mid = (to_rat(sorted[i - 1]) + to_rat(sorted[i])) * Rational(1, 2);
      REQUIRE_FALSE(cross_section(translate(O, mid), Rational(1)));
    }
  }
}

TEST_CASE("return times contain 0 and are symmetric") {
  Xoshiro256 rng(8);
  for (int i = 0; i < 20; ++i) {
    std::vector<CrossSectionPoint> pts;
    for (int k = 0; k < 3; ++k) {
      auto c = cross_section(cross_section_point(random_quadrat(rng, 2, 1, 7)), Rational(1));
      if (c) pts.push_back(*c);
    }
    if (pts.empty()) continue;
    auto B = CrossSectionSet::from_points(2, Rational(1), pts);
    auto R = return_times(B, Rational(100));
    REQUIRE(R.contains(Point{QuadInt::zero(2)}));
    REQUIRE(check_symmetry(R));
    // Brute-force definition: B meets hB.
    for (const auto& p : R.points) {
      const QuadInt& h = p[0];
      bool meets = false;
      for (const auto& x : pts) {
        HullPoint hx = translate(x.point, to_rat(h));
        for (const auto& y : pts) meets = meets || hx == y.point;
      }
      REQUIRE(meets);
    }
  }
}

TEST_CASE("return times of single points and the full cross-section") {
  auto o = cross_section(hull_origin(2), Rational(1));
  auto single = return_times(CrossSectionSet::from_points(2, Rational(1), std::span(&*o, 1)), Rational(500));
  REQUIRE(single.size() == 1);
  CHECK(single.points[0][0].is_zero());
  for (long d : {2L, 5L}) {
    for (Rational W0 : {Rational(1), Rational(1, 2)}) {
      auto full = return_times(CrossSectionSet::full(d, W0), Rational(300));
      CHECK(full.points == model(d, 2 * W0, Rational(300)).points);
    }
  }
  CHECK_THROWS_AS(return_times(CrossSectionSet{2, Rational(1), {}}, Rational(10)), PreconditionError);
  CrossSectionSet out{2, Rational(1), {{r(0), r(2)}}};
  CHECK_THROWS_AS(return_times(out, Rational(10)), PreconditionError);
}

TEST_CASE("return times are commensurable with the model set") {
  std::vector<std::size_t> fwd, back;
  for (long H : {200L, 400L}) {
    auto rep = return_times_report(CrossSectionSet::full(2, Rational(1)), Rational(H));
    CHECK(rep.times_by_lattice.complete);
    CHECK(rep.lattice_by_times.complete);
    fwd.push_back(rep.times_by_lattice.size);
    back.push_back(rep.lattice_by_times.size);
  }
  CHECK(fwd[0] == fwd[1]);
  CHECK(back[0] == back[1]);
  CHECK(fwd[0] <= 4);
  CHECK(back[0] == 1);
}

TEST_CASE("orbit times near the cross-section equidistribute") {
  for (long d : {2L, 3L}) {
    for (Rational eps : {Rational(1, 10), Rational(1, 20), Rational(1, 40)}) {
      auto e = equidistribution(Rational(10000), eps, d, Rational(1));
      INFO("d=" << d << " eps=" << eps.get_str());
      CHECK(e.relative_error < 0.05);
      CHECK(e.expected == Catch::Approx(2 * eps.get_d() / std::sqrt(static_cast<double>(d))));
    }
  }
  CHECK_THROWS_AS(equidistribution(Rational(0), Rational(1, 10), 2, Rational(1)), PreconditionError);
}

TEST_CASE("exponential moment over the fundamental domain") {
  for (long d : {2L, 3L}) {
    for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
      const int n = 400;
      const double rd = std::sqrt(static_cast<double>(d));
      double sum = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double s = (i + 0.5) / n, t = (j + 0.5) / n;
          sum += std::exp(alpha * std::abs(s + t * rd));
        }
      }
      double riemann = sum / (n * static_cast<double>(n)) * 2 * rd;
      CHECK(exponential_moment(alpha, d) == Catch::Approx(riemann).epsilon(1e-4));
    }
  }
}
