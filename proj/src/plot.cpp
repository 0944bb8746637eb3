// Copyright 2026 The parkslam Authors
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

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "parkslam/errors.hpp"
#include "parkslam/plot.hpp"

namespace parkslam {
namespace {

constexpr const char* kTraceColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
constexpr const char* kTraceDashes[] = {"none", "6,3", "2,2", "8,2,2,2", "1,3"};

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  return std::string(buf, res.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

struct Frame {
  double min_x = 0.0, min_y = 0.0, max_x = 10.0, max_y = 10.0;
  double scale = 10.0;
  double margin = 40.0;

  double px(double x) const { return margin + (x - min_x) * scale; }
  // SVG y grows downwards.
  double py(double y) const { return margin + (max_y - y) * scale; }
  double width() const { return 2.0 * margin + (max_x - min_x) * scale; }
  double height() const { return 2.0 * margin + (max_y - min_y) * scale; }
};

Frame fit(const SemanticMap& map, const std::vector<NamedTrace>& traces) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  auto grow = [&](Point2 p) {
    lo_x = std::min(lo_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_x = std::max(hi_x, p.x);
    hi_y = std::max(hi_y, p.y);
  };
  for (const auto& s : map.slots) for (const auto& c : s.corners) grow(c);
  for (const auto& t : map.tags) grow(t.position);
  for (const auto& tr : traces) for (const auto& p : tr.poses) grow(p.translation());
  Frame f;
  if (std::isfinite(lo_x)) {
    f.min_x = lo_x - 1.0;
    f.min_y = lo_y - 1.0;
    f.max_x = std::max(hi_x + 1.0, f.min_x + 1.0);
    f.max_y = std::max(hi_y + 1.0, f.min_y + 1.0);
  }
  return f;
}

}  // namespace

std::string render_svg(const SemanticMap& map, const std::vector<NamedTrace>& traces) {
  const Frame f = fit(map, traces);
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width()) << "\" height=\""
      << num(f.height()) << "\" viewBox=\"0 0 " << num(f.width()) << ' ' << num(f.height())
      << "\">\n";
  out << "<g class=\"axes\" stroke=\"#888\" stroke-width=\"1\">\n"
      << "<line class=\"axis\" x1=\"" << num(f.px(f.min_x)) << "\" y1=\"" << num(f.py(f.min_y))
      << "\" x2=\"" << num(f.px(f.max_x)) << "\" y2=\"" << num(f.py(f.min_y)) << "\"/>\n"
      << "<line class=\"axis\" x1=\"" << num(f.px(f.min_x)) << "\" y1=\"" << num(f.py(f.min_y))
      << "\" x2=\"" << num(f.px(f.min_x)) << "\" y2=\"" << num(f.py(f.max_y)) << "\"/>\n"
      << "<text class=\"axis-label\" x=\"" << num(f.px(f.max_x)) << "\" y=\""
      << num(f.py(f.min_y) + 15.0) << "\" font-size=\"10\">x [m]</text>\n"
      << "<text class=\"axis-label\" x=\"" << num(f.px(f.min_x) - 30.0) << "\" y=\""
      << num(f.py(f.max_y)) << "\" font-size=\"10\">y [m]</text>\n"
      << "</g>\n";

  out << "<g class=\"slots\">\n";
  for (const MapSlot& s : map.slots) {
    out << "<polygon class=\"slot\" points=\"";
    for (std::size_t k = 0; k < 4; ++k) {
      out << (k ? " " : "") << num(f.px(s.corners[k].x)) << ',' << num(f.py(s.corners[k].y));
    }
    out << "\" fill=\"none\" stroke=\"" << (s.id ? "#333" : "#c60") << "\" stroke-width=\"1.5\"/>\n";
    const Point2 c = centroid(s.corners);
    out << "<text class=\"slot-label\" x=\"" << num(f.px(c.x)) << "\" y=\"" << num(f.py(c.y))
        << "\" font-size=\"10\" text-anchor=\"middle\">" << escape(s.label()) << "</text>\n";
  }
  out << "</g>\n<g class=\"tags\">\n";
  for (const MapTag& t : map.tags) {
    out << "<rect class=\"tag\" data-id=\"" << t.tag_id << "\" x=\"" << num(f.px(t.position.x) - 3.0)
        << "\" y=\"" << num(f.py(t.position.y) - 3.0)
        << "\" width=\"6\" height=\"6\" fill=\"#000\"/>\n";
  }
  out << "</g>\n<g class=\"traces\">\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const char* color = kTraceColors[i % std::size(kTraceColors)];
    const char* dash = kTraceDashes[(i / std::size(kTraceColors) + i) % std::size(kTraceDashes)];
    out << "<polyline class=\"trace\" data-name=\"" << escape(traces[i].name) << "\" style=\"stroke:"
        << color << ";stroke-dasharray:" << dash << ";fill:none;stroke-width:1.2\" points=\"";
    for (std::size_t k = 0; k < traces[i].poses.size(); ++k) {
      const Pose2& p = traces[i].poses[k];
      out << (k ? " " : "") << num(f.px(p.x())) << ',' << num(f.py(p.y()));
    }
    out << "\"/>\n";
  }
  out << "</g>\n<g class=\"legend\" font-size=\"10\">\n";
  out << "<text class=\"legend-entry\" x=\"10\" y=\"14\">slots: " << map.slots.size()
      << ", tags: " << map.tags.size() << "</text>\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    out << "<text class=\"legend-entry\" x=\"10\" y=\"" << 28 + 14 * i << "\" fill=\""
        << kTraceColors[i % std::size(kTraceColors)] << "\">" << escape(traces[i].name) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void export_plot(const SemanticMap& map, const std::vector<NamedTrace>& traces,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::IoFailure, "cannot write '" + path + "'");
  out << render_svg(map, traces);
  out.flush();
  if (!out) throw Error(ErrorCategory::IoFailure, "write to '" + path + "' failed");
}

}  // namespace parkslam
