// qlat: command-line driver for the model-set, quasimorphism and hull stages.
//
// Exit codes: 0 ok, 1 stage failure, 2 configuration or usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qlat/experiment.hpp"

namespace {

using qlat::ExperimentConfig;
using qlat::Rational;

struct Overrides {
  std::optional<long> d;
  std::optional<std::string> window;
  std::optional<int> dim;
  std::optional<std::string> radius;
  std::optional<std::string> horizon;
  std::optional<std::string> out;

  void add(CLI::App* app, bool ring = true) {
    if (ring) {
      app->add_option("--d", d, "ring parameter d (squarefree, >= 2)");
      app->add_option("--window", window, "window half-width, exact rational (hull: W0)");
      app->add_option("--dim", dim, "physical dimension");
      app->add_option("--radius", radius, "patch radius, exact rational");
      app->add_option("--horizon", horizon, "return-time horizon, exact rational");
    }
    app->add_option("--out", out, "output directory");
  }

  void apply(ExperimentConfig& c) const {
    std::vector<std::string> diag;
    auto rat = [&](const std::optional<std::string>& s, const char* name, bool positive) -> std::optional<Rational> {
      if (!s) return std::nullopt;
      try {
        Rational v = qlat::parse_rational(*s);
        if (sgn(v) < 0 || (positive && sgn(v) == 0)) {
          diag.push_back(std::string("--") + name + (positive ? ": must be positive" : ": must be non-negative"));
          return std::nullopt;
        }
        return v;
      } catch (const qlat::Error&) {
        diag.push_back(std::string("--") + name + ": expected an exact rational such as 1/2");
        return std::nullopt;
      }
    };
    if (d) {
      if (*d < 2 || *d > 1000000 || !qlat::is_squarefree(*d)) diag.push_back("--d: must be squarefree in [2, 10^6]");
      else c.d = *d;
    }
    if (auto w = rat(window, "window", false)) {
      c.window = *w;
      if (sgn(*w) > 0) c.hull.W0 = *w;
    }
    if (dim) {
      if (*dim < 1 || *dim > 3) diag.push_back("--dim: must be 1, 2 or 3");
      else c.dim = *dim;
    }
    if (auto r = rat(radius, "radius", false)) c.radius = *r;
    if (auto h = rat(horizon, "horizon", true)) c.hull.horizon = *h;
    if (out) c.output = *out;
    if (!diag.empty()) throw qlat::ConfigError(diag);
  }
};

int execute(const ExperimentConfig& c) {
  auto rr = qlat::run(c, c.output);
  std::cout << "wrote";
  for (const auto& a : rr.artifacts) std::cout << " " << a;
  std::cout << " to " << c.output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact model sets, approximate lattices, quasimorphisms and hull cross-sections"};
  app.require_subcommand(1, 1);

  Overrides gen_o, an_o, qu_o, hu_o, run_o;

  auto* gen = app.add_subcommand("generate", "enumerate a model-set patch and export CSV/SVG");
  gen_o.add(gen);

  auto* an = app.add_subcommand("analyze", "symmetry, gaps, K-constant and chains of a patch CSV");
  std::string an_input;
  bool an_no_chains = false;
  an->add_option("patch", an_input, "patch CSV written by generate")->required();
  an->add_flag("--no-chains", an_no_chains, "skip efficient-generation chains");
  an_o.add(an, false);

  auto* qu = app.add_subcommand("quasi", "defect, homogenization, laminarity probe and twisted patch");
  std::optional<std::string> qu_spec;
  std::optional<int> qu_length;
  qu->add_option("--spec", qu_spec, "quasimorphism spec JSON (default: the ab counting quasimorphism)");
  qu->add_option("--length", qu_length, "exhaustive defect word length (<= 10)");
  qu_o.add(qu);

  auto* hu = app.add_subcommand("hull", "return times, cross-section hits and cocycle checks");
  hu_o.add(hu);

  auto* rn = app.add_subcommand("run", "run every enabled stage of a config");
  std::string run_config;
  rn->add_option("config", run_config, "experiment config JSON")->required();
  run_o.add(rn);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig c;
    if (*gen) {
      c.generate.enabled = true;
      gen_o.apply(c);
    } else if (*an) {
      c.analysis.enabled = true;
      c.analysis.input = an_input;
      c.analysis.chains = !an_no_chains;
      an_o.apply(c);
    } else if (*qu) {
      c.quasi.enabled = true;
      if (qu_spec) {
        std::ifstream in(*qu_spec);
        if (!in) throw qlat::ConfigError({"--spec: cannot open " + *qu_spec});
        try {
          c.quasi.h = qlat::quasimorphism_from_json(qlat::Json::parse(in));
        } catch (const std::exception& e) {
          throw qlat::ConfigError({std::string("--spec: ") + e.what()});
        }
      }
      if (qu_length) {
        if (*qu_length < 0 || *qu_length > 10) throw qlat::ConfigError({"--length: must be in [0, 10]"});
        c.quasi.defect_length = *qu_length;
      }
      qu_o.apply(c);
    } else if (*hu) {
      c.hull.enabled = true;
      hu_o.apply(c);
    } else {
      c = qlat::load_config(run_config);
      run_o.apply(c);
    }
    return execute(c);
  } catch (const qlat::ConfigError& e) {
    std::cerr << "qlat: " << e.what() << "\n";
    return 2;
  } catch (const qlat::ParseError& e) {
    std::cerr << "qlat: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qlat: " << e.what() << "\n";
    return 1;
  }
}
