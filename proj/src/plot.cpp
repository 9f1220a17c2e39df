// Copyright 2026 The pdesmooth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pdesmooth/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pdesmooth {
namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
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

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, const PlotOptions& opts) {
  if (series.empty()) throw std::invalid_argument("emit_plot: no series given");
  for (const Series& s : series) {
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("emit_plot: series '" + s.label + "' has " +
                                  std::to_string(s.x.size()) + " x values and " +
                                  std::to_string(s.y.size()) + " y values");
    if (s.x.empty()) throw std::invalid_argument("emit_plot: series '" + s.label + "' is empty");
  }

  auto ty = [&](double y) { return opts.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!opts.log_y || y > 0);
  };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!std::isfinite(x0)) {
    x0 = 0;
    x1 = 1;
    y0 = 0;
    y1 = 1;
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }

  const double left = 70, right = 160, top = 40, bottom = 50;
  const double pw = opts.width - left - right, ph = opts.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
      << opts.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty())
    svg << "<text x=\"" << coord(left + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-size=\"13\">" << escape(opts.title) << "</text>\n";

  // axes and ticks
  svg << "<g stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top + ph) << "\" x2=\""
      << coord(left + pw) << "\" y2=\"" << coord(top + ph) << "\"/>\n"
      << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\"" << coord(left)
      << "\" y2=\"" << coord(top + ph) << "\"/>\n</g>\n";
  constexpr int kTicks = 5;
  for (int k = 0; k <= kTicks; ++k) {
    const double xv = x0 + (x1 - x0) * k / kTicks;
    const double yv = y0 + (y1 - y0) * k / kTicks;
    svg << "<line x1=\"" << coord(px(xv)) << "\" y1=\"" << coord(top + ph) << "\" x2=\""
        << coord(px(xv)) << "\" y2=\"" << coord(top + ph + 4) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << coord(px(xv)) << "\" y=\"" << coord(top + ph + 16)
        << "\" text-anchor=\"middle\">" << number(xv) << "</text>\n";
    svg << "<line x1=\"" << coord(left - 4) << "\" y1=\"" << coord(py(yv)) << "\" x2=\""
        << coord(left) << "\" y2=\"" << coord(py(yv)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << coord(left - 6) << "\" y=\"" << coord(py(yv) + 4)
        << "\" text-anchor=\"end\">" << number(opts.log_y ? std::pow(10.0, yv) : yv)
        << "</text>\n";
  }
  svg << "<text x=\"" << coord(left + pw / 2) << "\" y=\"" << coord(opts.height - 10.0)
      << "\" text-anchor=\"middle\">" << escape(opts.x_label) << "</text>\n";
  svg << "<text x=\"15\" y=\"" << coord(top + ph / 2) << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 15 " << coord(top + ph / 2) << ")\">"
      << escape(opts.y_label + (opts.log_y ? " (log)" : "")) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!usable(series[s].x[i], series[s].y[i])) continue;
      if (!first) svg << ' ';
      svg << coord(px(series[s].x[i])) << ',' << coord(py(ty(series[s].y[i])));
      first = false;
    }
    svg << "\"/>\n";
  }

  // legend, in input order
  const double lx = left + pw + 15;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = top + 10 + 18.0 * static_cast<double>(s);
    svg << "<line x1=\"" << coord(lx) << "\" y1=\"" << coord(ly) << "\" x2=\"" << coord(lx + 20)
        << "\" y2=\"" << coord(ly) << "\" stroke=\"" << kPalette[s % std::size(kPalette)]
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text class=\"legend\" x=\"" << coord(lx + 26) << "\" y=\"" << coord(ly + 4) << "\">"
        << escape(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<Series>& series, const std::string& path, const PlotOptions& opts) {
  const std::string svg = render_svg(series, opts);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_plot: cannot write " + path);
  out << svg;
}

}  // namespace pdesmooth
