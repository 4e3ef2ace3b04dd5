#pragma once

// Experiment driver: configuration, the generate / analyze / quasi / hull
// stages, artifact export and the consolidated report.
//
// report.json carries only exact or deterministic fields; wall-clock timings
// go to timings.json next to it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qlat/apxgroup.hpp"
#include "qlat/cutproject.hpp"
#include "qlat/error.hpp"
#include "qlat/hull.hpp"
#include "qlat/io.hpp"
#include "qlat/quasi.hpp"
#include "qlat/rational.hpp"
#include "qlat/ring.hpp"
#include "qlat/rng.hpp"
#include "qlat/svg.hpp"

namespace qlat {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kReportSchema = "qlat-run-report/1";

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics)
      : Error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  static std::string join(const std::vector<std::string>& d) {
    std::string s = "invalid config";
    for (const auto& x : d) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> diagnostics_;
};

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  long d = 2;
  Rational window{1};
  int dim = 1;
  Rational radius{100};

  struct Generate {
    bool enabled = false;
  } generate;

  struct Analysis {
    bool enabled = false;
    std::optional<std::string> input;  // patch CSV instead of enumerating
    bool symmetry = true;
    bool gaps = true;
    bool k_constant = true;
    bool chains = true;
    int chain_samples = 1000;
    Rational chain_norm{1000000};
  } analysis;

  struct Quasi {
    bool enabled = false;
    std::optional<std::string> spec_path;
    QuasiMorphism h = QuasiMorphism::counting("ab");
    int defect_length = 8;
    std::vector<FreeWord> tests{reduce("abAB")};
    int m1 = 4;
    int m2 = 4;
    int residual_samples = 200;
    std::optional<Rational> residual_window;  // default: the computed defect
    int twisted_length = 6;
    Rational fiber_window{1};
    Rational fiber_radius{4};
    int drift_powers = 64;
  } quasi;

  struct Hull {
    bool enabled = false;
    Rational W0{1};
    Rational horizon{1000};
    Rational T{10000};
    Rational eps{1, 10};
    int cocycle_samples = 1000;
  } hull;

  std::string output = "out";
};

namespace detail {

class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& diag) : diag_(diag) {}

  void object(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      diag_.push_back(where + ": expected an object");
      return;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) diag_.push_back(where + "." + it.key() + ": unknown field");
    }
  }

  void boolean(const Json& j, const char* key, const std::string& where, bool& out) {
    if (!j.is_object() || !j.contains(key)) return;
    if (!j[key].is_boolean()) diag_.push_back(where + "." + key + ": expected true or false");
    else out = j[key].get<bool>();
  }

  void integer(const Json& j, const char* key, const std::string& where, long lo, long hi, auto& out) {
    if (!j.is_object() || !j.contains(key)) return;
    if (!j[key].is_number_integer()) {
      diag_.push_back(where + "." + key + ": expected an integer");
      return;
    }
    long v = j[key].get<long>();
    if (v < lo || v > hi) {
      diag_.push_back(where + "." + key + ": must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return;
    }
    out = static_cast<std::remove_reference_t<decltype(out)>>(v);
  }

  void rational(const Json& j, const char* key, const std::string& where, Rational& out, bool positive = false) {
    if (!j.is_object() || !j.contains(key)) return;
    try {
      Rational v = rational_from_json(j[key], where + "." + key);
      if (sgn(v) < 0 || (positive && sgn(v) == 0)) {
        diag_.push_back(where + "." + key + (positive ? ": must be positive" : ": must be non-negative"));
        return;
      }
      out = v;
    } catch (const Error&) {
      diag_.push_back(where + "." + key + ": expected an exact rational string such as \"1/2\"");
    }
  }

  void string(const Json& j, const char* key, const std::string& where, std::optional<std::string>& out) {
    if (!j.is_object() || !j.contains(key)) return;
    if (!j[key].is_string()) diag_.push_back(where + "." + key + ": expected a string");
    else out = j[key].get<std::string>();
  }

 private:
  std::vector<std::string>& diag_;
};

}  // namespace detail

// Paths in the config (quasimorphism spec, analysis input) are relative to
// base_dir, normally the config file's directory.
inline ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base_dir = ".") {
  std::vector<std::string> diag;
  detail::FieldReader r(diag);
  ExperimentConfig c;
  r.object(j, "config", {"version", "seed", "ring", "scheme", "generate", "analysis", "quasi", "hull", "output"});
  if (!j.is_object()) throw ConfigError(diag);
  if (j.contains("version") && !(j["version"].is_number_integer() && j["version"].get<long>() == 1)) {
    diag.push_back("config.version: only version 1 is supported");
  }
  if (j.contains("seed")) {
    if (j["seed"].is_number_unsigned()) c.seed = j["seed"].get<std::uint64_t>();
    else if (j["seed"].is_number_integer() && j["seed"].get<long>() >= 0) c.seed = static_cast<std::uint64_t>(j["seed"].get<long>());
    else diag.push_back("config.seed: expected a non-negative 64-bit integer");
  }
  if (j.contains("ring")) {
    const Json& ring = j["ring"];
    r.object(ring, "ring", {"d", "window"});
    r.integer(ring, "d", "ring", 2, 1000000, c.d);
    if (!is_squarefree(c.d)) diag.push_back("ring.d: must be squarefree");
    r.rational(ring, "window", "ring", c.window);
  }
  if (j.contains("scheme")) {
    const Json& s = j["scheme"];
    r.object(s, "scheme", {"dim", "radius"});
    r.integer(s, "dim", "scheme", 1, 3, c.dim);
    r.rational(s, "radius", "scheme", c.radius);
  }
  if (j.contains("generate")) {
    r.object(j["generate"], "generate", {"enabled"});
    r.boolean(j["generate"], "enabled", "generate", c.generate.enabled);
  }
  if (j.contains("analysis")) {
    const Json& a = j["analysis"];
    r.object(a, "analysis", {"enabled", "input", "symmetry", "gaps", "k_constant", "chains", "chain_samples", "chain_norm"});
    r.boolean(a, "enabled", "analysis", c.analysis.enabled);
    r.string(a, "input", "analysis", c.analysis.input);
    if (c.analysis.input) c.analysis.input = (base_dir / *c.analysis.input).string();
    r.boolean(a, "symmetry", "analysis", c.analysis.symmetry);
    r.boolean(a, "gaps", "analysis", c.analysis.gaps);
    r.boolean(a, "k_constant", "analysis", c.analysis.k_constant);
    r.boolean(a, "chains", "analysis", c.analysis.chains);
    r.integer(a, "chain_samples", "analysis", 1, 1000000, c.analysis.chain_samples);
    r.rational(a, "chain_norm", "analysis", c.analysis.chain_norm, true);
  }
  if (j.contains("quasi")) {
    const Json& q = j["quasi"];
    r.object(q, "quasi", {"enabled", "spec", "spec_path", "defect_length", "tests", "m1", "m2", "residual_samples",
                          "residual_window", "twisted_length", "fiber_window", "fiber_radius", "drift_powers"});
    r.boolean(q, "enabled", "quasi", c.quasi.enabled);
    if (q.is_object() && q.contains("spec") && q.contains("spec_path")) {
      diag.push_back("quasi: give either spec or spec_path, not both");
    }
    try {
      if (q.is_object() && q.contains("spec")) c.quasi.h = quasimorphism_from_json(q["spec"]);
    } catch (const Error& e) {
      diag.push_back(std::string("quasi.spec: ") + e.what());
    }
    r.string(q, "spec_path", "quasi", c.quasi.spec_path);
    if (c.quasi.spec_path) {
      auto path = base_dir / *c.quasi.spec_path;
      std::ifstream in(path);
      if (!in) {
        diag.push_back("quasi.spec_path: cannot open " + path.string());
      } else {
        try {
          c.quasi.h = quasimorphism_from_json(Json::parse(in));
        } catch (const std::exception& e) {
          diag.push_back("quasi.spec_path: " + std::string(e.what()));
        }
      }
    }
    r.integer(q, "defect_length", "quasi", 0, 10, c.quasi.defect_length);
    if (q.is_object() && q.contains("tests")) {
      if (!q["tests"].is_array() || q["tests"].empty()) {
        diag.push_back("quasi.tests: expected a non-empty array of words");
      } else {
        c.quasi.tests.clear();
        for (std::size_t i = 0; i < q["tests"].size(); ++i) {
          const Json& t = q["tests"][i];
          std::string where = "quasi.tests[" + std::to_string(i) + "]";
          if (!t.is_string()) {
            diag.push_back(where + ": expected a word string");
            continue;
          }
          try {
            FreeWord w = reduce(t.get<std::string>());
            auto [ea, eb] = w.exponent_sums();
            if (ea != 0 || eb != 0) diag.push_back(where + ": must lie in the commutator subgroup");
            c.quasi.tests.push_back(w);
          } catch (const Error& e) {
            diag.push_back(where + ": " + e.what());
          }
        }
      }
    }
    r.integer(q, "m1", "quasi", 0, 5, c.quasi.m1);
    r.integer(q, "m2", "quasi", 0, 5, c.quasi.m2);
    r.integer(q, "residual_samples", "quasi", 1, 1000000, c.quasi.residual_samples);
    if (q.is_object() && q.contains("residual_window")) {
      Rational w;
      r.rational(q, "residual_window", "quasi", w);
      c.quasi.residual_window = w;
    }
    r.integer(q, "twisted_length", "quasi", 0, 10, c.quasi.twisted_length);
    r.rational(q, "fiber_window", "quasi", c.quasi.fiber_window);
    r.rational(q, "fiber_radius", "quasi", c.quasi.fiber_radius);
    r.integer(q, "drift_powers", "quasi", 1, 4096, c.quasi.drift_powers);
  }
  if (j.contains("hull")) {
    const Json& h = j["hull"];
    r.object(h, "hull", {"enabled", "W0", "horizon", "T", "eps", "cocycle_samples"});
    r.boolean(h, "enabled", "hull", c.hull.enabled);
    r.rational(h, "W0", "hull", c.hull.W0, true);
    r.rational(h, "horizon", "hull", c.hull.horizon, true);
    r.rational(h, "T", "hull", c.hull.T, true);
    r.rational(h, "eps", "hull", c.hull.eps, true);
    r.integer(h, "cocycle_samples", "hull", 0, 10000000, c.hull.cocycle_samples);
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) diag.push_back("config.output: expected a directory string");
    else c.output = j["output"].get<std::string>();
  }
  if (!diag.empty()) throw ConfigError(diag);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config " + path.string()});
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({"malformed JSON in " + path.string() + ": " + e.what()});
  }
  return parse_config(j, path.parent_path());
}

inline Json config_echo(const ExperimentConfig& c) {
  Json j;
  j["version"] = 1;
  j["seed"] = c.seed;
  j["ring"] = Json{{"d", c.d}, {"window", to_json(c.window)}};
  j["scheme"] = Json{{"dim", c.dim}, {"radius", to_json(c.radius)}};
  j["generate"] = Json{{"enabled", c.generate.enabled}};
  Json a{{"enabled", c.analysis.enabled}, {"symmetry", c.analysis.symmetry}, {"gaps", c.analysis.gaps},
         {"k_constant", c.analysis.k_constant}, {"chains", c.analysis.chains},
         {"chain_samples", c.analysis.chain_samples}, {"chain_norm", to_json(c.analysis.chain_norm)}};
  if (c.analysis.input) a["input"] = std::filesystem::path(*c.analysis.input).filename().string();
  j["analysis"] = a;
  Json tests = Json::array();
  for (const auto& t : c.quasi.tests) tests.push_back(t.str());
  Json q{{"enabled", c.quasi.enabled}, {"spec", to_json(c.quasi.h)}, {"defect_length", c.quasi.defect_length},
         {"tests", tests}, {"m1", c.quasi.m1}, {"m2", c.quasi.m2}, {"residual_samples", c.quasi.residual_samples},
         {"twisted_length", c.quasi.twisted_length}, {"fiber_window", to_json(c.quasi.fiber_window)},
         {"fiber_radius", to_json(c.quasi.fiber_radius)}, {"drift_powers", c.quasi.drift_powers}};
  if (c.quasi.residual_window) q["residual_window"] = to_json(*c.quasi.residual_window);
  j["quasi"] = q;
  j["hull"] = Json{{"enabled", c.hull.enabled}, {"W0", to_json(c.hull.W0)}, {"horizon", to_json(c.hull.horizon)},
                   {"T", to_json(c.hull.T)}, {"eps", to_json(c.hull.eps)},
                   {"cocycle_samples", c.hull.cocycle_samples}};
  return j;
}

// ---------------------------------------------------------------------------
// Stages. Each returns its report fragment and writes its artifacts into
// out_dir.

struct Artifacts {
  std::filesystem::path dir;
  std::vector<std::string> written;

  void write(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) throw Error("cannot write " + (dir / name).string());
    written.push_back(name);
  }
};

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline PointPatch stage_patch(const ExperimentConfig& c) {
  if (c.analysis.input) {
    std::ifstream in(*c.analysis.input);
    if (!in) throw Error("cannot open patch " + *c.analysis.input);
    return read_patch_csv(in);
  }
  auto scheme = CutProjectScheme::uniform(RingContext::make(c.d, c.window), c.dim, c.window);
  return enumerate_model_set(scheme, c.radius);
}

inline Json run_generate(const ExperimentConfig& c, Artifacts& art) {
  auto scheme = CutProjectScheme::uniform(RingContext::make(c.d, c.window), c.dim, c.window);
  PointPatch patch = enumerate_model_set(scheme, c.radius);
  art.write("patch.csv", patch_csv(patch));
  art.write("patch.svg", plot_patch(patch, "model set d=" + std::to_string(c.d)));
  Json j;
  j["points"] = patch.size();
  // |patch| / (2R)^n against (2w / 2 sqrt d)^n.
  double vol = std::pow(2.0 * c.radius.get_d(), c.dim);
  j["density"] = format_double(static_cast<double>(patch.size()) / vol);
  j["density_expected"] = format_double(std::pow(c.window.get_d() / std::sqrt(static_cast<double>(c.d)), c.dim));
  j["csv"] = "patch.csv";
  j["svg"] = "patch.svg";
  return j;
}

struct ChainStats {
  std::size_t samples = 0;
  bool all_replayed = true;
  bool all_within_bound = true;
  std::size_t max_length = 0;
  double median_ratio = 0.0;
  double max_ratio = 0.0;
  double log_constant = 0.0;
  double additive_constant = 0.0;
  std::size_t translates = 0;
  std::size_t seeds = 0;
};

// Chains for random PVS elements u with |u| <= norm; ratios are
// length / log(1 + |u|), skipping u = 0.
inline ChainStats chain_statistics(const RingContext& ctx, Xoshiro256& rng, int samples, const Rational& norm) {
  ChainGenerator gen(ctx);
  ChainStats st;
  st.log_constant = gen.log_constant();
  st.additive_constant = gen.additive_constant();
  st.translates = gen.translates().size();
  st.seeds = gen.seeds().size();
  std::vector<double> ratios;
  for (int i = 0; i < samples; ++i) {
    QuadInt u = random_pvs_element(rng, ctx.d, norm, ctx.window_bound);
    auto cert = gen.chain(u);
    ++st.samples;
    st.all_replayed = st.all_replayed && gen.replay(cert);
    st.all_within_bound = st.all_within_bound && gen.within_bound(cert);
    st.max_length = std::max(st.max_length, cert.length);
    if (!u.is_zero()) ratios.push_back(static_cast<double>(cert.length) / std::log1p(std::abs(to_double(u))));
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    std::size_t n = ratios.size();
    st.median_ratio = n % 2 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
    st.max_ratio = ratios.back();
  }
  return st;
}

inline Json to_json(const ChainStats& s) {
  return Json{{"samples", s.samples},
              {"all_replayed", s.all_replayed},
              {"all_within_bound", s.all_within_bound},
              {"max_length", s.max_length},
              {"median_ratio", format_double(s.median_ratio)},
              {"max_ratio", format_double(s.max_ratio)},
              {"ratio_within_3x_median", s.max_ratio <= 3.0 * s.median_ratio},
              {"log_constant", format_double(s.log_constant)},
              {"additive_constant", format_double(s.additive_constant)},
              {"translates", s.translates},
              {"seeds", s.seeds}};
}

inline Json run_analyze(const ExperimentConfig& c, Xoshiro256& rng) {
  PointPatch patch = stage_patch(c);
  Json j;
  j["patch_size"] = patch.size();
  if (c.analysis.symmetry) j["symmetric"] = check_symmetry(patch);
  Rational margin = default_margin(patch);
  j["boundary_margin"] = to_json(margin);
  if (c.analysis.k_constant) {
    auto rep = covering_constant(patch, margin);
    j["K_constant"] = rep.K_constant;
    Json F = Json::array();
    for (const auto& f : rep.translates) F.push_back(to_json(f));
    j["translates"] = F;
    j["core_size"] = rep.core_size;
    j["sum_count"] = rep.sum_count;
    j["cover_complete"] = rep.complete;
  }
  if (c.analysis.gaps) {
    j["min_gap"] = patch.size() >= 2 ? to_json(min_gap(patch)) : Json(nullptr);
    j["covering_radius"] = patch.dim <= 2 ? to_json(covering_radius(patch, margin)) : Json(nullptr);
  }
  if (c.analysis.chains) {
    auto ctx = RingContext::make(patch.d, patch.window.empty() ? c.window : patch.window[0]);
    auto stats = chain_statistics(ctx, rng, c.analysis.chain_samples, c.analysis.chain_norm);
    j["chains"] = to_json(stats);
    if (patch.d == ctx.d) {
      QuadInt u = ctx.fundamental_unit * ctx.fundamental_unit;
      if (pvs_member(u, ctx)) {
        ChainGenerator gen(ctx);
        j["chains"]["example"] = to_json(gen.chain(u));
      }
    }
  }
  return j;
}

inline Json run_quasi(const ExperimentConfig& c, Xoshiro256& rng, Artifacts& art) {
  const auto& q = c.quasi;
  Json j;
  j["quasimorphism"] = to_json(q.h);
  auto def = defect(q.h, q.defect_length);
  j["defect"] = to_json(def);
  Json hom = Json::array();
  for (const auto& t : q.tests) {
    try {
      auto hv = homogenize(q.h, t);
      hom.push_back(Json{{"element", t.str()}, {"value", to_json(hv.value)}, {"N", hv.N}});
    } catch (const ConvergenceError&) {
      hom.push_back(Json{{"element", t.str()}, {"value", nullptr}, {"N", nullptr}});
    }
  }
  j["homogenized"] = hom;
  j["probe"] = to_json(laminarity_probe(q.h, q.tests));

  // Integer-valued lift on words of length <= max(m1 + m2, twisted_length).
  const int L = std::max(q.m1 + q.m2, q.twisted_length);
  auto words = all_reduced_words(L);
  bool integral = true;
  for (const auto& t : q.h.terms) integral = integral && t.weight.get_den() == 1;
  if (!integral) {
    j["residual"] = nullptr;
    j["twisted"] = nullptr;
    j["note"] = "weights are not integral; ring-valued stages skipped";
    return j;
  }
  auto lifted = lift(q.h, words, c.d);
  std::vector<std::pair<FreeWord, FreeWord>> samples;
  for (int i = 0; i < q.residual_samples; ++i) {
    FreeWord g1 = random_word(rng, static_cast<int>(rng.uniform(0, q.m1)));
    FreeWord g2 = random_word(rng, static_cast<int>(rng.uniform(0, q.m2)));
    samples.emplace_back(std::move(g1), std::move(g2));
  }
  PointPatch fiber;
  fiber.d = c.d;
  fiber.window = {q.fiber_window};
  Rational bound = q.residual_window.value_or(def.value);
  j["residual"] = to_json(qc_residual_check(lifted, fiber, q.m1, q.m2, samples, bound));

  auto group = all_reduced_words(q.twisted_length);
  auto tp = build_twisted(lifted, group, c.d, q.fiber_window, q.fiber_radius);
  Json tw;
  tw["length"] = q.twisted_length;
  tw["size"] = tp.size();
  tw["fiber_size"] = tp.fiber.size();
  auto K = twisted_covering_constant(tp, q.twisted_length / 2);
  tw["K_constant"] = K.K_constant;
  tw["cover_complete"] = K.complete;
  auto split = splitting_section(tp);
  tw["splitting_section"] = split.found ? Json{{"found", true}, {"a", to_json(split.image_a)}, {"b", to_json(split.image_b)}}
                                        : Json{{"found", false}};
  art.write("twisted.svg", plot_twisted(tp, "twisted patch"));
  tw["svg"] = "twisted.svg";
  j["twisted"] = tw;

  const FreeWord comm = reduce("abAB");
  auto vals = power_values(q.h, comm, q.drift_powers);
  Json dv = Json::array();
  bool linear = true;
  for (std::size_t n = 0; n < vals.size(); ++n) {
    dv.push_back(to_json(vals[n]));
    linear = linear && vals[n] == vals[0] * Rational(static_cast<long>(n + 1));
  }
  j["drift"] = Json{{"element", comm.str()}, {"values", dv}, {"linear", linear}};
  return j;
}

inline Json run_hull(const ExperimentConfig& c, Xoshiro256& rng, Artifacts& art) {
  const auto& h = c.hull;
  const long d = c.d;
  Json j;
  auto B = CrossSectionSet::full(d, h.W0);
  Json rt = Json::array();
  for (const Rational& R : std::vector<Rational>{h.horizon, Rational(h.horizon * 2)}) {
    auto rep = return_times_report(B, R);
    if (R == h.horizon) art.write("return_times.csv", patch_csv(rep.times));
    rt.push_back(Json{{"horizon", to_json(R)},
                      {"size", rep.times.size()},
                      {"times_by_lattice", rep.times_by_lattice.size},
                      {"lattice_by_times", rep.lattice_by_times.size},
                      {"complete", rep.times_by_lattice.complete && rep.lattice_by_times.complete}});
  }
  j["return_times"] = rt;
  j["return_times_stable"] = rt[0]["times_by_lattice"] == rt[1]["times_by_lattice"] &&
                             rt[0]["lattice_by_times"] == rt[1]["lattice_by_times"];
  j["return_times_csv"] = "return_times.csv";

  auto hits = orbit_hits(h.T, d, h.W0);
  std::ostringstream hs;
  write_hits_csv(hs, hits);
  art.write("hits.csv", hs.str());
  j["orbit_hits"] = Json{{"T", to_json(h.T)}, {"count", hits.size()}, {"csv", "hits.csv"}};

  auto eq = equidistribution(h.T, h.eps, d, h.W0);
  j["equidistribution"] = Json{{"eps", to_json(h.eps)},
                               {"fraction", format_double(eq.fraction)},
                               {"expected", format_double(eq.expected)},
                               {"relative_error", format_double(eq.relative_error)}};

  std::size_t failures = 0;
  for (int i = 0; i < h.cocycle_samples; ++i) {
    QuadRat t = random_quadrat(rng, d, 20, 16);
    QuadRat t2 = random_quadrat(rng, d, 20, 16);
    Vec2 v{random_quadrat(rng, d, 5, 16), random_quadrat(rng, d, 5, 16)};
    HullPoint X = section(v).rep;
    QuadInt gamma(Integer(rng.uniform(-50, 50)), Integer(rng.uniform(-50, 50)), d);
    if (!cocycle_identity_holds(t, t2, X) || !section_invariant(v, gamma)) ++failures;
  }
  j["cocycle"] = Json{{"samples", h.cocycle_samples}, {"failures", failures}};
  j["exponential_moment"] = Json{{"alpha", 1}, {"value", format_double(exponential_moment(1.0, d))}};
  return j;
}

struct RunReport {
  Json report;
  Json timings;
  std::vector<std::string> artifacts;
};

// Stages run in the order generate, analyze, quasi, hull, each drawing from
// its own PRNG stream (seed + stage index) so toggling one stage does not
// shift the samples of another.
inline RunReport run(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  using clock = std::chrono::steady_clock;
  RunReport rr;
  Artifacts art{out_dir, {}};
  Json stages = Json::object();
  Json timings = Json::object();
  auto stage = [&](const char* name, std::uint64_t index, auto&& fn) {
    auto t0 = clock::now();
    Xoshiro256 rng(c.seed + index);
    try {
      stages[name] = fn(rng);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
    timings[name] = std::chrono::duration<double>(clock::now() - t0).count();
  };
  if (c.generate.enabled) stage("generate", 0, [&](Xoshiro256&) { return run_generate(c, art); });
  if (c.analysis.enabled) stage("analyze", 1, [&](Xoshiro256& rng) { return run_analyze(c, rng); });
  if (c.quasi.enabled) stage("quasi", 2, [&](Xoshiro256& rng) { return run_quasi(c, rng, art); });
  if (c.hull.enabled) stage("hull", 3, [&](Xoshiro256& rng) { return run_hull(c, rng, art); });
  Json report;
  report["schema"] = kReportSchema;
  report["version"] = kVersion;
  report["config"] = config_echo(c);
  report["stages"] = stages;
  Json files = Json::array();
  for (const auto& f : art.written) files.push_back(f);
  files.push_back("report.json");
  report["artifacts"] = files;
  art.write("report.json", dump(report));
  art.write("timings.json", dump(timings));
  rr.report = std::move(report);
  rr.timings = std::move(timings);
  rr.artifacts = std::move(art.written);
  return rr;
}

}  // namespace qlat
