#pragma once

// Static scatter plots: 800x600 canvas, one 2px circle per point, fixed
// two-decimal coordinates so equal input gives equal bytes.

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "qlat/cutproject.hpp"
#include "qlat/error.hpp"
#include "qlat/quasi.hpp"
#include "qlat/ring.hpp"

namespace qlat {

struct PlotLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
};

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string scatter_svg(const std::vector<std::pair<double, double>>& pts, const PlotLabels& labels) {
  if (pts.empty()) throw PreconditionError("plot: empty input");
  constexpr int W = 800, H = 600, left = 60, right = 20, top = 40, bottom = 50;
  double x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
  for (const auto& [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (x1 - x0 < 1e-12) {
    x0 -= 1;
    x1 += 1;
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 1;
    y1 += 1;
  }
  const double sx = (W - left - right) / (x1 - x0);
  const double sy = (H - top - bottom) / (y1 - y0);
  std::string s;
  char buf[512];
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  s += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" stroke=\"#888\"/>\n",
                left, top, W - left - right, H - top - bottom);
  s += buf;
  if (!labels.title.empty()) {
    s += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         xml_escape(labels.title) + "</text>\n";
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"400\" y=\"590\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">");
  s += buf + xml_escape(labels.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"300\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       "transform=\"rotate(-90 16 300)\">" +
       xml_escape(labels.y_label) + "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"10\">%.4g</text>\n"
                "<text x=\"%d\" y=\"%d\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">%.4g</text>\n",
                left, H - bottom + 14, x0, W - right, H - bottom + 14, x1);
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"%d\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">%.4g</text>\n"
                "<text x=\"%d\" y=\"%d\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">%.4g</text>\n",
                left - 4, H - bottom, y0, left - 4, top + 8, y1);
  s += buf;
  s += "<g fill=\"#1f4e9c\">\n";
  for (const auto& [x, y] : pts) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1\"/>\n", left + (x - x0) * sx,
                  H - bottom - (y - y0) * sy);
    s += buf;
  }
  s += "</g>\n</svg>\n";
  return s;
}

// Physical against internal value of the first coordinate.
inline std::string plot_patch(const PointPatch& patch, const std::string& title = "") {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(patch.size());
  for (const auto& p : patch.points) pts.emplace_back(to_double(p[0]), to_double(p[0], Embedding::conjugate));
  return scatter_svg(pts, {title, "physical", "internal"});
}

// Word length against fiber value.
inline std::string plot_twisted(const FreeTwistedPatch& tp, const std::string& title = "") {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(tp.pairs.size());
  for (const auto& [g, x] : tp.pairs) pts.emplace_back(static_cast<double>(g.size()), to_double(x));
  return scatter_svg(pts, {title, "word length", "fiber value"});
}

inline std::size_t count_markers(const std::string& svg) {
  std::size_t n = 0;
  for (std::size_t pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++n;
  return n;
}

}  // namespace qlat
