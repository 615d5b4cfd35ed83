// Copyright 2026 The stcorridor Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal static SVG line charts, stacked vertically in one document.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace stcorridor::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Optional fixed y range; ignored when y_min >= y_max.
  double y_min = 0.0;
  double y_max = 0.0;
};

namespace detail {

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline void write_panels(std::ostream& os, const std::vector<Panel>& panels, int width = 720,
                         int panel_height = 300) {
  constexpr int kLeft = 70;
  constexpr int kRight = 150;
  constexpr int kTop = 30;
  constexpr int kBottom = 45;
  const int height = panel_height * static_cast<int>(panels.size());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os.precision(6);
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& p = panels[pi];
    const double oy = static_cast<double>(pi) * panel_height;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : p.series) {
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        x0 = std::min(x0, s.x[k]);
        x1 = std::max(x1, s.x[k]);
        y0 = std::min(y0, s.y[k]);
        y1 = std::max(y1, s.y[k]);
      }
    }
    if (p.y_min < p.y_max) {
      y0 = p.y_min;
      y1 = p.y_max;
    }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    const double pw = width - kLeft - kRight;
    const double ph = panel_height - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return oy + kTop + (1.0 - (std::clamp(y, y0, y1) - y0) / (y1 - y0)) * ph; };

    os << "<text x=\"" << kLeft << "\" y=\"" << oy + 18 << "\" font-weight=\"bold\">"
       << detail::escape(p.title) << "</text>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << oy + kTop << "\" width=\"" << pw << "\" height=\""
       << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double xv = x0 + (x1 - x0) * k / 4.0;
      const double yv = y0 + (y1 - y0) * k / 4.0;
      os << "<text x=\"" << px(xv) << "\" y=\"" << oy + kTop + ph + 15
         << "\" text-anchor=\"middle\">" << xv << "</text>\n";
      os << "<text x=\"" << kLeft - 5 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yv
         << "</text>\n";
    }
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << oy + panel_height - 8
       << "\" text-anchor=\"middle\">" << detail::escape(p.x_label) << "</text>\n";
    os << "<text x=\"15\" y=\"" << oy + kTop + ph / 2 << "\" transform=\"rotate(-90 15 "
       << oy + kTop + ph / 2 << ")\" text-anchor=\"middle\">" << detail::escape(p.y_label)
       << "</text>\n";
    for (std::size_t si = 0; si < p.series.size(); ++si) {
      const Series& s = p.series[si];
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
      if (s.dashed) os << " stroke-dasharray=\"5,3\"";
      os << " points=\"";
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        os << px(s.x[k]) << ',' << py(s.y[k]) << ' ';
      }
      os << "\"/>\n";
      const double ly = oy + kTop + 12 + 16.0 * static_cast<double>(si);
      os << "<line x1=\"" << kLeft + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
         << kLeft + pw + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\"/>\n";
      os << "<text x=\"" << kLeft + pw + 35 << "\" y=\"" << ly << "\">" << detail::escape(s.label)
         << "</text>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace stcorridor::svg
