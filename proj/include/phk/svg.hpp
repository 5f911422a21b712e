#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "phk/common.hpp"
#include "phk/io.hpp"

namespace phk {

struct SvgSeries {
  std::string label;
  std::vector<std::array<double, 2>> points;
};

namespace io {

// Standalone SVG line plot: axes, one polyline per series, fixed palette.
// Output bytes depend only on the input series, so identical inputs give
// identical files.
inline std::string render_svg(const std::vector<SvgSeries>& series) {
  require(!series.empty(), "svg needs at least one series");
  for (const auto& s : series) require(!s.points.empty(), "svg series must be nonempty");

  const double W = 640, H = 480, ml = 70, mr = 20, mt = 20, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      xmin = std::min(xmin, p[0]);
      xmax = std::max(xmax, p[0]);
      ymin = std::min(ymin, p[1]);
      ymax = std::max(ymax, p[1]);
    }
  if (xmax - xmin < 1e-300) {
    xmin -= 1;
    xmax += 1;
  }
  if (ymax - ymin < 1e-300) {
    ymin -= 1;
    ymax += 1;
  }
  auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto Y = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
  auto num = [&](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  // axes
  out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(W - mr) +
         "\" y2=\"" + num(H - mb) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" +
         num(H - mb) + "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + num(ml) + "\" y=\"" + num(H - mb + 20) + "\" font-size=\"12\">" +
         num(xmin) + "</text>\n";
  out += "<text x=\"" + num(W - mr - 40) + "\" y=\"" + num(H - mb + 20) +
         "\" font-size=\"12\">" + num(xmax) + "</text>\n";
  out += "<text x=\"5\" y=\"" + num(H - mb) + "\" font-size=\"12\">" + num(ymin) + "</text>\n";
  out += "<text x=\"5\" y=\"" + num(mt + 10) + "\" font-size=\"12\">" + num(ymax) + "</text>\n";

  int idx = 0;
  for (const auto& s : series) {
    const char* color = palette[idx % 8];
    if (s.points.size() == 1) {
      // degenerate series: a marker, no polyline
      out += "<circle cx=\"" + num(X(s.points[0][0])) + "\" cy=\"" + num(Y(s.points[0][1])) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    } else {
      out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"";
      for (const auto& p : s.points) out += num(X(p[0])) + "," + num(Y(p[1])) + " ";
      out += "\"/>\n";
    }
    out += "<text x=\"" + num(W - mr - 120) + "\" y=\"" + num(mt + 16 + 16 * idx) +
           "\" font-size=\"12\" fill=\"" + color + "\">" + s.label + "</text>\n";
    ++idx;
  }
  out += "</svg>\n";
  return out;
}

inline void emit_svg(const std::vector<SvgSeries>& series, const std::string& path) {
  write_file(path, render_svg(series));
}

}  // namespace io
}  // namespace phk
