// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// the number of failures (capped at 1).
//
//   acceptance <default-config> <scratch-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qlat/apxgroup.hpp"
#include "qlat/cutproject.hpp"
#include "qlat/experiment.hpp"
#include "qlat/hull.hpp"
#include "qlat/quasi.hpp"
#include "qlat/rng.hpp"

using namespace qlat;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int n, const char* name, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && s > limit_s) {
    o.pass = false;
    o.detail += " [over time limit]";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d %-22s %s  %s (%.2fs)\n", n, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), s);
  std::fflush(stdout);
}

// b sqrt d <= c, exactly.
bool root_le(const Integer& b, const Rational& c, long d) {
  if (sgn(b) <= 0 && sgn(c) >= 0) return true;
  if (sgn(b) >= 0 && sgn(c) < 0) return false;
  Rational lhs = Rational(b * b * d), rhs = c * c;
  return sgn(b) > 0 ? lhs <= rhs : lhs >= rhs;
}

// |a + s b sqrt d| <= r for s = +1 or -1.
bool within(const Integer& a, const Integer& b, int s, const Rational& r, long d) {
  Integer sb = s > 0 ? b : Integer(-b);
  return root_le(sb, r - a, d) && root_le(Integer(-sb), r + a, d);
}

std::vector<QuadInt> double_loop(long d, const Rational& w, const Rational& R) {
  // |a| <= (R + w) / 2 and |b| sqrt d <= (R + w) / 2.
  Rational half = (R + w) / 2;
  long A = static_cast<long>(std::floor(half.get_d())) + 1;
  long B = static_cast<long>(std::floor(half.get_d() / std::sqrt(static_cast<double>(d)))) + 1;
  std::vector<QuadInt> out;
  for (long a = -A; a <= A; ++a) {
    for (long b = -B; b <= B; ++b) {
      if (within(Integer(a), Integer(b), 1, R, d) && within(Integer(a), Integer(b), -1, w, d)) {
        out.emplace_back(Integer(a), Integer(b), d);
      }
    }
  }
  std::sort(out.begin(), out.end(), LexLess{});
  return out;
}

PointPatch patch(long d, const Rational& w, const Rational& R) {
  return enumerate_model_set(CutProjectScheme::uniform(RingContext::make(d, w), 1, w), R);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

QuasiMorphism h_ab() { return QuasiMorphism::counting("ab"); }
QuasiMorphism abelianization() { return QuasiMorphism::counting("a"); }

BoundedCochain<Rational> random_cochain(Xoshiro256& rng, int degree, std::span<const FreeWord> words) {
  BoundedCochain<Rational> c;
  c.degree = degree;
  c.finitely_supported = true;
  for (const auto& t : all_tuples(words, degree)) {
    if (rng.below(3) == 0) continue;
    c.values[t] = Rational(rng.uniform(-50, 50), rng.uniform(1, 9));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: acceptance <default-config> <scratch-dir>\n");
    return 2;
  }
  const fs::path config_path = argv[1];
  const fs::path scratch = argv[2];

  criterion(1, "model-set-exactness", 5.0, [] {
    std::size_t cases = 0, discrepancies = 0;
    for (long d : {2L, 3L, 5L}) {
      for (Rational w : {Rational(1, 2), Rational(1), Rational(2)}) {
        for (Rational R : {Rational(10), Rational(50), Rational(200)}) {
          auto got = patch(d, w, R);
          auto want = double_loop(d, w, R);
          std::vector<QuadInt> flat;
          for (const auto& p : got.points) flat.push_back(p[0]);
          std::sort(flat.begin(), flat.end(), LexLess{});
          std::vector<QuadInt> only_got, only_want;
          std::set_difference(flat.begin(), flat.end(), want.begin(), want.end(), std::back_inserter(only_got),
                              LexLess{});
          std::set_difference(want.begin(), want.end(), flat.begin(), flat.end(), std::back_inserter(only_want),
                              LexLess{});
          discrepancies += only_got.size() + only_want.size() + (flat.size() != got.size());
          ++cases;
        }
      }
    }
    return Outcome{discrepancies == 0, std::to_string(cases) + " cases, " + std::to_string(discrepancies) + " discrepancies"};
  });

  criterion(2, "density", 10.0, [] {
    const double target = 1.0 / std::sqrt(2.0);
    auto share = [](const Rational& R) { return static_cast<double>(patch(2, Rational(1), R).size()) / (2 * R.get_d()); };
    double e4 = std::abs(share(Rational(10000)) - target) / target;
    double e5 = std::abs(share(Rational(100000)) - target) / target;
    std::size_t direct = double_loop(2, Rational(1), Rational(1000)).size();
    std::size_t enumerated = patch(2, Rational(1), Rational(1000)).size();
    bool ok = e4 < 0.02 && e5 < 0.005 && direct == enumerated;
    return Outcome{ok, "rel err " + fmt(e4) + " at 1e4, " + fmt(e5) + " at 1e5; count at 1e3 " +
                           std::to_string(enumerated) + " vs direct " + std::to_string(direct)};
  });

  criterion(3, "K-constant-stability", 30.0, [] {
    std::vector<std::size_t> K;
    bool complete = true;
    for (long R : {50L, 100L, 200L}) {
      auto rep = covering_constant(patch(2, Rational(1), Rational(R)));
      K.push_back(rep.K_constant);
      complete = complete && rep.complete;
    }
    bool ok = complete && K[0] == K[1] && K[1] == K[2];
    return Outcome{ok, "K = " + std::to_string(K[0]) + ", " + std::to_string(K[1]) + ", " + std::to_string(K[2]) +
                           " at R = 50, 100, 200"};
  });

  criterion(4, "efficient-chains", 10.0, [] {
    Xoshiro256 rng(4);
    auto ctx = RingContext::make(2, Rational(1));
    auto st = chain_statistics(ctx, rng, 1000, Rational(1000000));
    bool ok = st.samples == 1000 && st.all_replayed && st.max_ratio <= 3.0 * st.median_ratio;
    return Outcome{ok, std::to_string(st.samples) + " chains, replayed " + (st.all_replayed ? "all" : "NOT all") +
                           ", max ratio " + fmt(st.max_ratio) + " vs median " + fmt(st.median_ratio)};
  });

  criterion(5, "quasimorphism-suite", 20.0, [] {
    auto h = h_ab();
    auto def = defect(h, 8);
    bool stable = def.stabilized_at <= 8 && def.by_length.size() == 9;
    for (int k = def.stabilized_at; k <= 8 && stable; ++k) stable = def.by_length[k] == def.value;
    auto hv = homogenize(h, commutator(reduce("a"), reduce("b")));
    bool hom = hv.value == 1;

    Xoshiro256 rng(5);
    auto small = all_reduced_words(1);
    auto mid = all_reduced_words(2);
    auto big = all_reduced_words(4);
    CochainAction<Rational> sign_a = [](const FreeWord& g, const Rational& v) {
      return g.exponent_sums().first % 2 ? Rational(-v) : v;
    };
    std::size_t nonzero = 0, cochains = 0;
    for (int i = 0; i < 100; ++i) {
      const auto& act = i % 2 ? sign_a : trivial_action<Rational>();
      int degree = i % 3;
      BoundedCochain<Rational> c = random_cochain(rng, degree, degree == 2 ? std::span<const FreeWord>(mid) : big);
      auto dc = coboundary(c, all_tuples(mid, degree + 1), act);
      auto ddc = coboundary(dc, all_tuples(small, degree + 2), act);
      for (const auto& [t, v] : ddc.values) nonzero += v != 0;
      ++cochains;
    }

    const int m1 = 4, m2 = 4;
    auto lifted = lift(h, all_reduced_words(m1 + m2), 2);
    std::vector<std::pair<FreeWord, FreeWord>> samples;
    for (int i = 0; i < 500; ++i) {
      FreeWord g1 = random_word(rng, static_cast<int>(rng.uniform(0, m1)));
      FreeWord g2 = random_word(rng, static_cast<int>(rng.uniform(0, m2)));
      samples.emplace_back(std::move(g1), std::move(g2));
    }
    PointPatch fiber;
    fiber.d = 2;
    fiber.window = {Rational(1)};
    auto res = qc_residual_check(lifted, fiber, m1, m2, samples, def.value);

    bool ok = stable && hom && nonzero == 0 && res.pass();
    return Outcome{ok, "defect " + def.value.get_str() + " stable from L=" + std::to_string(def.stabilized_at) +
                           ", h~([a,b]) = " + hv.value.get_str() + ", dd != 0 on " + std::to_string(nonzero) +
                           " tuples of " + std::to_string(cochains) + " cochains, residual " +
                           std::to_string(res.violations.size()) + "/" + std::to_string(res.checked) + " violations"};
  });

  criterion(6, "laminarity-dichotomy", 0, [] {
    const FreeWord comm = commutator(reduce("a"), reduce("b"));
    std::vector<FreeWord> tests{comm};
    auto p1 = laminarity_probe(h_ab(), tests);
    bool cert = p1.verdict == Verdict::non_laminar && p1.certificates.size() == 1 &&
                p1.certificates[0].element == comm && p1.certificates[0].homogenized &&
                *p1.certificates[0].homogenized == 1;
    auto p2 = laminarity_probe(abelianization(), tests);
    bool lam = p2.verdict == Verdict::laminar_consistent;

    auto group = all_reduced_words(6);
    auto hom_tp = build_twisted(lift(abelianization(), group, 2), group, 2, Rational(1), Rational(4));
    auto hab_tp = build_twisted(lift(h_ab(), group, 2), group, 2, Rational(1), Rational(4));
    bool split = splitting_section(hom_tp).found;
    bool no_split = !splitting_section(hab_tp).found;

    std::vector<FreeWord> powers;
    for (long n = 1; n <= 64; ++n) powers.push_back(power(comm, n));
    auto q = lift(h_ab(), powers, 2);
    auto vals = power_values(h_ab(), comm, 64);
    bool drift = vals.size() == 64;
    for (long n = 1; n <= 64 && drift; ++n) {
      drift = vals[n - 1] == n && q.at(powers[n - 1]) == QuadInt(Integer(n), Integer(0), 2);
    }
    bool ok = cert && lam && split && no_split && drift;
    return Outcome{ok, std::string("h_ab ") + verdict_name(p1.verdict) + ", abelianization " + verdict_name(p2.verdict) +
                           ", splitting " + (split ? "found" : "missing") + "/" + (no_split ? "absent" : "present") +
                           ", drift h([a,b]^n) = n " + (drift ? "for n <= 64" : "FAILED")};
  });

  criterion(7, "return-times", 30.0, [] {
    auto B = CrossSectionSet::full(2, Rational(1));
    std::string detail;
    bool ok = true;
    std::vector<std::size_t> sizes;
    for (long H : {1000L, 2000L}) {
      Rational horizon(H);
      auto rep = return_times_report(B, horizon);
      auto wide = patch(2, Rational(2), horizon);
      auto fwd = commensurability_cover(rep.times, wide);
      auto back = commensurability_cover(wide, rep.times);
      for (const auto* c : {&rep.times_by_lattice, &rep.lattice_by_times, &fwd, &back}) {
        ok = ok && c->complete && c->size <= 4;
        sizes.push_back(c->size);
      }
      detail += (H == 1000 ? "" : "; ") + std::string("horizon ") + std::to_string(H) + ": |R(B)| " +
                std::to_string(rep.times.size()) + ", window-" + "1 covers " + std::to_string(rep.times_by_lattice.size) +
                "/" + std::to_string(rep.lattice_by_times.size) + ", window-2 covers " + std::to_string(fwd.size) + "/" +
                std::to_string(back.size);
    }
    bool stable = std::equal(sizes.begin(), sizes.begin() + 4, sizes.begin() + 4);
    return Outcome{ok && stable, detail + (stable ? ", stable" : ", NOT stable")};
  });

  criterion(8, "cocycle-identities", 0, [] {
    Xoshiro256 rng(8);
    std::size_t cocycle_fail = 0, section_fail = 0;
    for (int i = 0; i < 1000; ++i) {
      QuadRat t = random_quadrat(rng, 2, 20, 16);
      QuadRat t2 = random_quadrat(rng, 2, 20, 16);
      Vec2 v{random_quadrat(rng, 2, 5, 16), random_quadrat(rng, 2, 5, 16)};
      HullPoint X = section(v).rep;
      QuadInt gamma(Integer(rng.uniform(-50, 50)), Integer(rng.uniform(-50, 50)), 2);
      cocycle_fail += !cocycle_identity_holds(t, t2, X);
      section_fail += !section_invariant(v, gamma);
    }
    return Outcome{cocycle_fail == 0 && section_fail == 0, "1000 triples, " + std::to_string(cocycle_fail) +
                                                               " cocycle and " + std::to_string(section_fail) +
                                                               " invariance failures"};
  });

  criterion(9, "determinism", 0, [&] {
    auto config = load_config(config_path);
    fs::remove_all(scratch / "a");
    fs::remove_all(scratch / "b");
    auto ra = run(config, scratch / "a");
    auto rb = run(config, scratch / "b");
    std::size_t compared = 0, differing = 0;
    bool same_set = ra.artifacts == rb.artifacts;
    for (const auto& f : ra.artifacts) {
      if (f == "timings.json") continue;
      fs::path ext = fs::path(f).extension();
      if (f != "report.json" && ext != ".svg") continue;
      ++compared;
      differing += slurp(scratch / "a" / f) != slurp(scratch / "b" / f);
    }
    bool has_report = std::find(ra.artifacts.begin(), ra.artifacts.end(), "report.json") != ra.artifacts.end();
    bool ok = same_set && has_report && compared >= 3 && differing == 0;
    return Outcome{ok, std::to_string(compared) + " files compared (report and SVGs), " + std::to_string(differing) +
                           " differ"};
  });

  return failures ? 1 : 0;
}
