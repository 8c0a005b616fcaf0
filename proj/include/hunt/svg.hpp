#pragma once

// SVG overlay of a workspace with a planned or executed path.

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "hunt/geometry.hpp"

namespace hunt {

inline std::string render_svg(const WorkspaceSpec& ws, const std::vector<Vec2>& path,
                              const std::vector<int>& highlight = {}, double scale = 40.0) {
  const auto& b = ws.bounds;
  const double w = b.width() * scale, h = b.height() * scale;
  auto X = [&](double x) { return (x - b.xmin) * scale; };
  auto Y = [&](double y) { return (b.ymax - y) * scale; };
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n", w, h);
  out << buf;
  std::snprintf(buf, sizeof buf, "<rect x=\"0\" y=\"0\" width=\"%.1f\" height=\"%.1f\" fill=\"white\" stroke=\"black\"/>\n", w, h);
  out << buf;
  for (const auto& poly : ws.obstacles) {
    out << "<polygon fill=\"#888\" points=\"";
    for (auto v : poly) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(v.x), Y(v.y));
      out << buf;
    }
    out << "\"/>\n";
  }
  for (const auto& t : ws.targets) {
    const bool hot = std::find(highlight.begin(), highlight.end(), t.id) != highlight.end();
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"%s\"/>\n", X(t.position.x),
                  Y(t.position.y), hot ? "crimson" : "steelblue");
    out << buf;
  }
  if (path.size() >= 2) {
    out << "<polyline fill=\"none\" stroke=\"darkgreen\" stroke-width=\"2\" points=\"";
    for (auto p : path) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(p.x), Y(p.y));
      out << buf;
    }
    out << "\"/>\n";
  }
  std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"5\" fill=\"none\" stroke=\"black\"/>\n",
                X(ws.start.x), Y(ws.start.y));
  out << buf << "</svg>\n";
  return out.str();
}

}  // namespace hunt
