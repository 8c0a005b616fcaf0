#pragma once

// Workspace JSON form and the library of named layouts.
//
//   {"name": "roomA",
//    "bounds": [xmin, ymin, xmax, ymax],
//    "obstacles": [[[x, y], ...], ...],          // CCW vertex lists
//    "targets": [{"id": 0, "position": [x, y], "class": 1, "features": [0, 2, 1, 0]}],
//    "start": [x, y, theta]}
//
// Layout files add "target_count" (targets drawn per scenario) and an
// optional "fog_radius" (m).

#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hunt/error.hpp"
#include "hunt/geometry.hpp"

namespace hunt {

inline nlohmann::json to_json(const Polygon& poly) {
  nlohmann::json out = nlohmann::json::array();
  for (auto v : poly) out.push_back({v.x, v.y});
  return out;
}

inline nlohmann::json to_json(const Pose& p) { return nlohmann::json::array({p.x, p.y, p.theta}); }

inline Pose pose_from_json(const nlohmann::json& j) {
  require(j.is_array() && j.size() == 3, ErrorCode::ParseError, "pose must be [x, y, theta]");
  return Pose{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline nlohmann::json to_json(const WorkspaceSpec& ws) {
  nlohmann::json obstacles = nlohmann::json::array();
  for (const auto& poly : ws.obstacles) obstacles.push_back(to_json(poly));
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : ws.targets)
    targets.push_back({{"id", t.id},
                       {"position", {t.position.x, t.position.y}},
                       {"class", t.true_class},
                       {"features", t.features}});
  return {{"name", ws.name},
          {"bounds", {ws.bounds.xmin, ws.bounds.ymin, ws.bounds.xmax, ws.bounds.ymax}},
          {"obstacles", std::move(obstacles)},
          {"targets", std::move(targets)},
          {"start", to_json(ws.start)}};
}

inline WorkspaceSpec workspace_from_json(const nlohmann::json& j) {
  try {
    WorkspaceSpec ws;
    ws.name = j.value("name", std::string{});
    const auto& b = j.at("bounds");
    require(b.size() == 4, ErrorCode::ParseError, "bounds must be [xmin, ymin, xmax, ymax]");
    ws.bounds = Rect{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    for (const auto& jp : j.value("obstacles", nlohmann::json::array())) {
      Polygon poly;
      for (const auto& v : jp) poly.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      ws.obstacles.push_back(std::move(poly));
    }
    for (const auto& jt : j.value("targets", nlohmann::json::array())) {
      Target t;
      t.id = jt.at("id").get<int>();
      t.position = {jt.at("position").at(0).get<double>(), jt.at("position").at(1).get<double>()};
      t.true_class = jt.at("class").get<std::size_t>();
      t.features = jt.at("features").get<std::vector<std::size_t>>();
      ws.targets.push_back(std::move(t));
    }
    ws.start = pose_from_json(j.at("start"));
    return ws;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("workspace json: ") + e.what());
  }
}

/// A workspace shape plus how many targets a scenario places in it.
struct Layout {
  WorkspaceSpec workspace;  // targets empty unless the layout pins them
  std::size_t target_count = 0;
  std::optional<double> fog_radius;
};

inline nlohmann::json to_json(const Layout& l) {
  auto j = to_json(l.workspace);
  j["target_count"] = l.target_count;
  j["fog_radius"] = l.fog_radius ? nlohmann::json(*l.fog_radius) : nlohmann::json(nullptr);
  return j;
}

inline Layout layout_from_json(const nlohmann::json& j) {
  Layout l;
  l.workspace = workspace_from_json(j);
  l.target_count = j.value("target_count", l.workspace.targets.size());
  if (j.contains("fog_radius") && !j["fog_radius"].is_null()) l.fog_radius = j["fog_radius"].get<double>();
  return l;
}

namespace layouts {

inline Polygon hwall(double x0, double x1, double y, double t = 0.2) { return make_box(x0, y - t / 2, x1, y + t / 2); }
inline Polygon vwall(double x, double y0, double y1, double t = 0.2) { return make_box(x - t / 2, y0, x + t / 2, y1); }

inline Layout human10x10() {
  Layout l;
  l.workspace.name = "human10x10";
  l.workspace.bounds = {0, 0, 10, 10};
  l.workspace.obstacles = {make_box(3, 3, 4, 5), make_box(6, 5.5, 7.5, 6.5), make_box(2, 7.5, 3.5, 8)};
  l.workspace.start = {0.5, 0.5, 0.0};
  l.target_count = 30;
  return l;
}

inline Layout fog20x20() {
  Layout l;
  l.workspace.name = "fog20x20";
  l.workspace.bounds = {0, 0, 20, 20};
  l.workspace.obstacles = {make_box(4, 4, 6, 6), make_box(12, 3, 14, 8), make_box(5, 12, 9, 13),
                           make_box(14, 13, 16, 17)};
  l.workspace.start = {1.0, 1.0, 0.0};
  l.target_count = 10;
  l.fog_radius = 1.0;
  return l;
}

// Four small maze-style case studies, 10 x 10 m.
inline Layout maze1() {
  Layout l;
  l.workspace.name = "maze1";
  l.workspace.bounds = {0, 0, 10, 10};
  l.workspace.obstacles = {hwall(0, 7.5, 3.3), hwall(2.5, 10, 6.6)};
  l.workspace.start = {0.6, 0.6, 0.0};
  l.target_count = 6;
  l.fog_radius = 1.5;
  return l;
}

inline Layout maze2() {
  Layout l;
  l.workspace.name = "maze2";
  l.workspace.bounds = {0, 0, 10, 10};
  l.workspace.obstacles = {vwall(3.3, 0, 7.5), vwall(6.6, 2.5, 10), make_box(8, 1, 9, 2)};
  l.workspace.start = {0.6, 0.6, std::numbers::pi / 2};
  l.target_count = 6;
  l.fog_radius = 1.5;
  return l;
}

inline Layout maze3() {
  Layout l;
  l.workspace.name = "maze3";
  l.workspace.bounds = {0, 0, 10, 10};
  l.workspace.obstacles = {make_box(2, 2, 4, 4), make_box(6, 2, 8, 4), make_box(2, 6, 4, 8), make_box(6, 6, 8, 8)};
  l.workspace.start = {0.6, 0.6, 0.0};
  l.target_count = 6;
  l.fog_radius = 1.5;
  return l;
}

inline Layout maze4() {
  Layout l;
  l.workspace.name = "maze4";
  l.workspace.bounds = {0, 0, 10, 10};
  // Nested U shape with the opening facing away from the start.
  l.workspace.obstacles = {Polygon{{2, 2}, {8, 2}, {8, 8}, {6.5, 8}, {6.5, 7.8}, {7.8, 7.8}, {7.8, 2.2}, {2.2, 2.2},
                                   {2.2, 7.8}, {3.5, 7.8}, {3.5, 8}, {2, 8}},
                           make_box(4.5, 4.5, 5.5, 5.5)};
  l.workspace.start = {0.6, 0.6, 0.0};
  l.target_count = 6;
  l.fog_radius = 1.5;
  return l;
}

// Four rooms around a cross of walls, each wall segment with a doorway.
inline Layout roomA() {
  Layout l;
  l.workspace.name = "roomA";
  l.workspace.bounds = {0, 0, 12, 12};
  l.workspace.obstacles = {
      vwall(6, 0, 2.0),    vwall(6, 3.3, 8.4), vwall(6, 9.7, 12),  // x = 6 with doors at y 2..3.3, 8.4..9.7
      hwall(0, 2.4, 6),    hwall(3.7, 5.9, 6),                     // west half, door at x 2.4..3.7
      hwall(6.1, 8.6, 6),  hwall(9.9, 12, 6),                      // east half, door at x 8.6..9.9
      make_box(2, 9, 3, 10), make_box(9, 2, 10, 3),
  };
  l.workspace.start = {1.0, 1.0, 0.0};
  l.target_count = 13;
  l.fog_radius = 1.0;
  return l;
}

// Corridor along the middle with three rooms on each side.
inline Layout roomB() {
  Layout l;
  l.workspace.name = "roomB";
  l.workspace.bounds = {0, 0, 14, 10};
  l.workspace.obstacles = {
      hwall(0, 1.5, 4),    hwall(2.8, 6.0, 4),  hwall(7.3, 10.5, 4), hwall(11.8, 14, 4),
      hwall(0, 3.0, 6),    hwall(4.3, 8.0, 6),  hwall(9.3, 12.0, 6), hwall(13.3, 14, 6),
      vwall(4.6, 0, 3.9),  vwall(9.3, 0, 3.9),  vwall(4.6, 6.1, 10), vwall(9.3, 6.1, 10),
      make_box(11, 8, 12, 9),
  };
  l.workspace.start = {0.7, 5.0, 0.0};
  l.target_count = 13;
  l.fog_radius = 1.0;
  return l;
}

inline std::vector<std::string> names() {
  return {"human10x10", "fog20x20", "maze1", "maze2", "maze3", "maze4", "roomA", "roomB"};
}

inline std::optional<Layout> find(std::string_view name) {
  if (name == "human10x10") return human10x10();
  if (name == "fog20x20") return fog20x20();
  if (name == "maze1") return maze1();
  if (name == "maze2") return maze2();
  if (name == "maze3") return maze3();
  if (name == "maze4") return maze4();
  if (name == "roomA") return roomA();
  if (name == "roomB") return roomB();
  return std::nullopt;
}

}  // namespace layouts

/// A built-in layout name or a path to a layout JSON file.
inline Layout resolve_layout(const std::string& ref) {
  if (auto l = layouts::find(ref)) return *l;
  std::ifstream in(ref);
  require(in.good(), ErrorCode::UnknownScenario, "unknown scenario '" + ref + "'");
  try {
    return layout_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, ref + ": " + e.what());
  }
}

}  // namespace hunt
