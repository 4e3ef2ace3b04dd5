#pragma once

// JSON and CSV forms of the library types.
//
// QuadInt:  {"a": "<decimal>", "b": "<decimal>", "d": <int>}
// QuadRat:  {"a": "<p/q>", "b": "<p/q>", "d": <int>}
// Rational: "<p/q>" (or "<p>")
// Patch CSV: a "# d=..,dim=..,radius=..,window=w1;w2;.." line, a column
// header, then one row per point with a_i, b_i, phys_i, int_i per coordinate.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlat/apxgroup.hpp"
#include "qlat/cutproject.hpp"
#include "qlat/error.hpp"
#include "qlat/hull.hpp"
#include "qlat/quasi.hpp"
#include "qlat/rational.hpp"
#include "qlat/ring.hpp"

namespace qlat {

using Json = nlohmann::ordered_json;

// Shortest round-trip form is not needed; a fixed 12 significant digits
// keeps files diffable and deterministic.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline Json to_json(const Rational& r) { return r.get_str(); }

inline Rational rational_from_json(const Json& j, const std::string& field = "value") {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw ParseError(field + ": expected a rational string");
}

inline Json to_json(const QuadInt& x) { return Json{{"a", x.a().get_str()}, {"b", x.b().get_str()}, {"d", x.d()}}; }

inline QuadInt quadint_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("a") || !j.contains("b") || !j.contains("d")) {
    throw ParseError("QuadInt: expected {\"a\", \"b\", \"d\"}");
  }
  if (!j["a"].is_string() || !j["b"].is_string() || !j["d"].is_number_integer()) {
    throw ParseError("QuadInt: a and b must be decimal strings, d an integer");
  }
  long d = j["d"].get<long>();
  if (!is_squarefree(d) || d < 2) throw ParseError("QuadInt: d must be squarefree and >= 2");
  return QuadInt(parse_integer(j["a"].get<std::string>()), parse_integer(j["b"].get<std::string>()), d);
}

inline Json to_json(const QuadRat& x) { return Json{{"a", x.a().get_str()}, {"b", x.b().get_str()}, {"d", x.d()}}; }

inline Json to_json(const Point& p) {
  Json arr = Json::array();
  for (const auto& x : p) arr.push_back(to_json(x));
  return arr;
}

inline Json to_json(const GapResult& g) {
  return Json{{"value", to_json(g.value)}, {"approx", format_double(to_double(g.value))},
              {"first", to_json(g.first)}, {"second", to_json(g.second)}};
}

inline Json to_json(const CoveringRadius& c) {
  Json j{{"approx", format_double(c.value)}};
  if (c.exact) j["exact"] = to_json(*c.exact);
  return j;
}

inline Json to_json(const PatchReport& r) {
  Json j;
  j["K_constant"] = r.K_constant;
  Json F = Json::array();
  for (const auto& f : r.translates) F.push_back(to_json(f));
  j["translates"] = F;
  j["min_gap"] = r.min_gap ? to_json(*r.min_gap) : Json(nullptr);
  j["covering_radius"] = r.covering_radius ? to_json(*r.covering_radius) : Json(nullptr);
  j["boundary_margin"] = to_json(r.boundary_margin);
  j["core_size"] = r.core_size;
  j["sum_count"] = r.sum_count;
  j["complete"] = r.complete;
  return j;
}

inline Json to_json(const ChainCertificate& c) {
  Json steps = Json::array();
  for (const auto& s : c.steps) {
    steps.push_back(Json{{"value", to_json(s.value)}, {"translate_index", s.translate_index}, {"seed", s.seed}});
  }
  return Json{{"target", to_json(c.target)}, {"contraction", to_json(c.contraction)}, {"length", c.length},
              {"steps", steps}};
}

inline Json to_json(const QuasiMorphism& h) {
  Json terms = Json::array();
  for (const auto& t : h.terms) terms.push_back(Json{{"pattern", t.pattern.str()}, {"weight", to_json(t.weight)}});
  return Json{{"terms", terms}};
}

inline QuasiMorphism quasimorphism_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array()) {
    throw ParseError("quasimorphism: expected {\"terms\": [...]}");
  }
  QuasiMorphism h;
  std::size_t i = 0;
  for (const auto& t : j["terms"]) {
    std::string where = "terms[" + std::to_string(i++) + "]";
    if (!t.is_object() || !t.contains("pattern") || !t["pattern"].is_string()) {
      throw ParseError(where + ".pattern: expected a word string");
    }
    Rational w = t.contains("weight") ? rational_from_json(t["weight"], where + ".weight") : Rational(1);
    try {
      h.add(t["pattern"].get<std::string>(), w);
    } catch (const PreconditionError& e) {
      throw ParseError(where + ".pattern: " + e.what());
    }
  }
  return h;
}

inline Json to_json(const DefectReport& r) {
  Json by = Json::array();
  for (const auto& v : r.by_length) by.push_back(to_json(v));
  return Json{{"value", to_json(r.value)}, {"by_length", by}, {"stabilized_at", r.stabilized_at},
              {"witness", Json::array({r.witness_g.str(), r.witness_h.str()})}};
}

inline Json to_json(const ProbeReport& r) {
  Json certs = Json::array();
  for (const auto& c : r.certificates) {
    certs.push_back(Json{{"element", c.element.str()},
                         {"homogenized", c.homogenized ? to_json(*c.homogenized) : Json(nullptr)}});
  }
  return Json{{"verdict", verdict_name(r.verdict)}, {"certificates", certs}};
}

inline Json to_json(const ResidualReport& r) {
  Json v = Json::array();
  for (const auto& x : r.violations) {
    v.push_back(Json{{"g1", x.g1.str()}, {"g2", x.g2.str()}, {"residual", to_json(x.residual)}});
  }
  return Json{{"pass", r.pass()}, {"bound", to_json(r.bound)}, {"checked", r.checked}, {"worst", to_json(r.worst)},
              {"violations", v}};
}

inline Json to_json(const CommensurabilityCover& c) {
  Json F = Json::array();
  for (const auto& f : c.translates) F.push_back(to_json(f));
  return Json{{"size", c.size}, {"complete", c.complete}, {"translates", F}};
}

// ---------------------------------------------------------------------------
// CSV.

inline void write_patch_csv(std::ostream& os, const PointPatch& p) {
  os << "# d=" << p.d << ",dim=" << p.dim << ",radius=" << p.radius.get_str() << ",window=";
  for (std::size_t i = 0; i < p.window.size(); ++i) os << (i ? ";" : "") << p.window[i].get_str();
  os << "\n";
  for (int i = 0; i < p.dim; ++i) {
    os << (i ? "," : "") << "a" << i << ",b" << i << ",phys" << i << ",int" << i;
  }
  os << "\n";
  for (const auto& pt : p.points) {
    for (std::size_t i = 0; i < pt.size(); ++i) {
      os << (i ? "," : "") << pt[i].a().get_str() << "," << pt[i].b().get_str() << ","
         << format_double(to_double(pt[i])) << "," << format_double(to_double(pt[i], Embedding::conjugate));
    }
    os << "\n";
  }
}

inline std::string patch_csv(const PointPatch& p) {
  std::ostringstream os;
  write_patch_csv(os, p);
  return os.str();
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

// Reads a patch written by write_patch_csv; the float columns are ignored and
// the patch is re-sorted and checked for the header's radius and window.
inline PointPatch read_patch_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw ParseError("patch csv: missing '# d=...' header");
  PointPatch p;
  bool have_d = false, have_dim = false, have_radius = false;
  for (const auto& kv : detail::split(line.substr(2), ',')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("patch csv: bad header field '" + kv + "'");
    std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
    if (k == "d") {
      p.d = to_long(parse_integer(v));
      have_d = true;
    } else if (k == "dim") {
      p.dim = static_cast<int>(to_long(parse_integer(v)));
      have_dim = true;
    } else if (k == "radius") {
      p.radius = parse_rational(v);
      have_radius = true;
    } else if (k == "window") {
      if (!v.empty()) {
        for (const auto& w : detail::split(v, ';')) p.window.push_back(parse_rational(w));
      }
    }
  }
  if (!have_d || !have_dim || !have_radius) throw ParseError("patch csv: header needs d, dim and radius");
  if (p.d < 2 || !is_squarefree(p.d)) throw ParseError("patch csv: d must be squarefree and >= 2");
  if (p.dim < 1) throw ParseError("patch csv: dim must be >= 1");
  if (!p.window.empty() && p.window.size() != static_cast<std::size_t>(p.dim)) {
    throw ParseError("patch csv: window needs one half-width per coordinate");
  }
  if (!std::getline(is, line)) throw ParseError("patch csv: missing column header");
  std::size_t row = 2;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = detail::split(line, ',');
    if (cells.size() != 4 * static_cast<std::size_t>(p.dim)) {
      throw ParseError("patch csv: row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells");
    }
    Point pt;
    for (int i = 0; i < p.dim; ++i) {
      pt.emplace_back(parse_integer(cells[4 * static_cast<std::size_t>(i)]),
                      parse_integer(cells[4 * static_cast<std::size_t>(i) + 1]), p.d);
    }
    for (std::size_t i = 0; i < pt.size(); ++i) {
      if (!abs_le(pt[i], p.radius)) throw ParseError("patch csv: row " + std::to_string(row) + " exceeds the radius");
      if (!p.window.empty() && !abs_le(pt[i], p.window[i], Embedding::conjugate)) {
        throw ParseError("patch csv: row " + std::to_string(row) + " lies outside the window");
      }
    }
    p.points.push_back(std::move(pt));
  }
  std::size_t n = p.points.size();
  p.normalize();
  if (p.points.size() != n) throw ParseError("patch csv: duplicate points");
  return p;
}

// Orbit hits X + (t, 0) in T: t, then its conjugate (the internal coordinate).
inline void write_hits_csv(std::ostream& os, std::span<const QuadInt> hits) {
  os << "a,b,t,internal\n";
  for (const auto& h : hits) {
    os << h.a().get_str() << "," << h.b().get_str() << "," << format_double(to_double(h)) << ","
       << format_double(to_double(h, Embedding::conjugate)) << "\n";
  }
}

}  // namespace qlat
