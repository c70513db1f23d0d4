// include/gwhi/svg.hpp

// Copyright 2026 gwhi authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// Static SVG line charts of HI curves over normalized lifetime.

#ifndef GWHI_SVG_HPP
#define GWHI_SVG_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <string>

#include "gwhi/data.hpp"
#include "gwhi/io.hpp"

namespace gwhi {

inline std::string svg_line_chart(std::span<const HICurve> curves, const std::string& title) {
  const double width = 640, height = 420;
  const double ml = 56, mr = 16, mt = 36, mb = 44;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double ymin = 0.0, ymax = 1.0;
  for (const auto& c : curves)
    for (double v : c.values) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto px = [&](double u) { return ml + u * pw; };
  auto py = [&](double v) { return mt + (1.0 - (v - ymin) / (ymax - ymin)) * ph; };
  auto num = [](double v) {
    if (std::abs(v) < 5e-3) v = 0.0;  // keep "-0.00" off the axis
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
    << " font-size=\"14\">" << title << "</text>\n";

  // Axes and grid.
  for (int i = 0; i <= 4; ++i) {
    double v = ymin + (ymax - ymin) * i / 4.0;
    double y = py(v);
    s << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << width - mr << "\" y2=\"" << y
      << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << ml - 6 << "\" y=\"" << y + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(v)
      << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    double u = i / 5.0;
    double x = px(u);
    s << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << height - mb
      << "\" stroke=\"#eeeeee\"/>\n";
    s << "<text x=\"" << x << "\" y=\"" << height - mb + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(u)
      << "</text>\n";
  }
  s << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">normalized "
       "lifetime</text>\n";
  s << "<text x=\"14\" y=\"" << mt + ph / 2
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 "
       "14 "
    << mt + ph / 2 << ")\">health indicator</text>\n";
  s << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  for (size_t ci = 0; ci < curves.size(); ++ci) {
    const auto& c = curves[ci];
    const char* color = palette[ci % 8];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < c.size(); ++i)
      s << px(c.lifetime_fraction(i)) << "," << py(c.values[i]) << " ";
    s << "\"/>\n";
    s << "<text x=\"" << width - mr - 4 << "\" y=\"" << mt + 16 + 14 * static_cast<double>(ci)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
      << "\">specimen " << c.specimen_id << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline void write_svg_chart(const fs::path& path, std::span<const HICurve> curves,
                            const std::string& title) {
  write_file_atomic(path, svg_line_chart(curves, title));
}

}  // namespace gwhi

#endif  // GWHI_SVG_HPP
