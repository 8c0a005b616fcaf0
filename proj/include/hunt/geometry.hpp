#pragma once

// 2D polygonal world: obstacles, sector fields of view, line of sight,
// visibility regions, free-space checks and ray casting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hunt/error.hpp"

namespace hunt {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct Rect {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
};

/// Simple polygon, counter-clockwise vertex order.
using Polygon = std::vector<Vec2>;

inline Polygon make_box(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

inline double signed_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

/// Sector-shaped field of view sharing its apex with the agent.
struct SectorFov {
  double angle_of_view = std::numbers::pi / 2.0;  // zeta, rad
  double radius = 1.5;                            // m
  double bisector_offset = 0.0;                   // rad, relative to heading

  void validate() const {
    require(angle_of_view > 0.0 && angle_of_view < 2.0 * std::numbers::pi, ErrorCode::InvalidArgument,
            "angle of view must lie in (0, 2pi)");
    require(radius > 0.0, ErrorCode::InvalidArgument, "FOV radius must be positive");
  }

  SectorFov with_radius(double r) const {
    SectorFov f = *this;
    f.radius = r;
    return f;
  }
};

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

namespace detail {
inline int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}
inline bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}
}  // namespace detail

/// Closed-segment intersection test.
inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  using detail::on_segment;
  using detail::orientation;
  const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

inline double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                   point_segment_distance(d, a, b)});
}

/// Boundary counts as inside.
inline bool point_in_polygon(Vec2 p, const Polygon& poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if (detail::orientation(a, b, p) == 0 && detail::on_segment(a, b, p)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

inline double distance_to_boundary(Vec2 p, const Polygon& poly) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) d = std::min(d, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

/// True if the closed segment touches the polygon's interior or boundary.
inline bool segment_hits_polygon(Vec2 a, Vec2 b, const Polygon& poly) {
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (segments_intersect(a, b, poly[i], poly[(i + 1) % poly.size()])) return true;
  return point_in_polygon(a, poly);
}

inline bool polygon_is_simple(const Polygon& poly) {
  const auto n = poly.size();
  if (n < 3 || std::abs(signed_area(poly)) <= 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

/// Ground-truth target placed in the world.
struct Target {
  int id = 0;
  Vec2 position;
  std::size_t true_class = 0;
  std::vector<std::size_t> features;  // one value index per feature, reveal order
};

struct WorkspaceSpec {
  std::string name;
  Rect bounds;
  std::vector<Polygon> obstacles;
  std::vector<Target> targets;
  Pose start;
};

inline bool line_of_sight(Vec2 s, Vec2 x, std::span<const Polygon> obstacles) {
  for (const auto& poly : obstacles)
    if (segment_hits_polygon(s, x, poly)) return false;
  return true;
}

/// Range within the radius and bearing within half the angle of view,
/// both boundaries inclusive.
inline bool in_fov(const Pose& pose, const SectorFov& fov, Vec2 x) {
  const Vec2 d = x - pose.position();
  const double range = norm(d);
  if (range > fov.radius) return false;
  if (range == 0.0) return true;
  const double bearing = wrap_angle(std::atan2(d.y, d.x) - pose.theta - fov.bisector_offset);
  return std::abs(bearing) <= 0.5 * fov.angle_of_view + 1e-12;
}

inline bool target_visible(const Pose& pose, const SectorFov& fov, const WorkspaceSpec& ws, Vec2 x) {
  return in_fov(pose, fov, x) && line_of_sight(pose.position(), x, ws.obstacles);
}

/// Ids of targets inside the FOV with clear line of sight, ascending.
inline std::vector<int> visible_targets(const Pose& pose, const SectorFov& fov, const WorkspaceSpec& ws) {
  std::vector<int> ids;
  for (const auto& t : ws.targets)
    if (target_visible(pose, fov, ws, t.position)) ids.push_back(t.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline constexpr double kDefaultFootprint = 0.2;

/// Disc footprint of radius rho stays inside the bounds and off every obstacle.
inline bool in_free_space(Vec2 p, double rho, const WorkspaceSpec& ws) {
  const auto& b = ws.bounds;
  if (p.x - rho < b.xmin || p.x + rho > b.xmax || p.y - rho < b.ymin || p.y + rho > b.ymax) return false;
  for (const auto& poly : ws.obstacles) {
    if (point_in_polygon(p, poly)) return false;
    if (distance_to_boundary(p, poly) < rho) return false;
  }
  return true;
}

inline bool in_free_space(const Pose& pose, double rho, const WorkspaceSpec& ws) {
  return in_free_space(pose.position(), rho, ws);
}

/// Swept-disc check for straight motion from a to b.
inline bool segment_free(Vec2 a, Vec2 b, double rho, const WorkspaceSpec& ws) {
  if (!in_free_space(a, rho, ws) || !in_free_space(b, rho, ws)) return false;
  for (const auto& poly : ws.obstacles) {
    for (std::size_t i = 0; i < poly.size(); ++i)
      if (segment_segment_distance(a, b, poly[i], poly[(i + 1) % poly.size()]) < rho) return false;
  }
  return true;
}

namespace detail {
/// Distance along the ray to segment cd, or infinity.
inline double ray_segment_hit(Vec2 origin, Vec2 dir, Vec2 c, Vec2 d) {
  const Vec2 e = d - c;
  const double denom = cross(dir, e);
  const Vec2 w = c - origin;
  if (std::abs(denom) < 1e-15) {
    if (std::abs(cross(w, dir)) > 1e-12) return std::numeric_limits<double>::infinity();
    const double t0 = dot(w, dir), t1 = dot(d - origin, dir);
    if (t0 < 0.0 && t1 < 0.0) return std::numeric_limits<double>::infinity();
    return std::max(0.0, std::min(t0, t1));
  }
  const double t = cross(w, e) / denom;
  const double u = cross(w, dir) / denom;
  if (t >= 0.0 && u >= 0.0 && u <= 1.0) return t;
  return std::numeric_limits<double>::infinity();
}
}  // namespace detail

/// Distance from the pose along heading (absolute, rad) to the first
/// obstacle or bounds edge, capped at max_range.
inline double ray_cast(Vec2 origin, double heading, double max_range, const WorkspaceSpec& ws) {
  const Vec2 dir{std::cos(heading), std::sin(heading)};
  double best = max_range;
  auto consider = [&](Vec2 c, Vec2 d) { best = std::min(best, detail::ray_segment_hit(origin, dir, c, d)); };
  const auto& b = ws.bounds;
  const Vec2 corners[4] = {{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}};
  for (int i = 0; i < 4; ++i) consider(corners[i], corners[(i + 1) % 4]);
  for (const auto& poly : ws.obstacles)
    for (std::size_t i = 0; i < poly.size(); ++i) consider(poly[i], poly[(i + 1) % poly.size()]);
  return best;
}

inline double ray_cast(const Pose& pose, double heading, double max_range, const WorkspaceSpec& ws) {
  return ray_cast(pose.position(), heading, max_range, ws);
}

struct VisibilityQuery {
  double grid_resolution = 0.25;  // m
  std::size_t headings = 16;
  double footprint = kDefaultFootprint;
};

/// Grid-sampled emptiness test for the set visibility region of `ids`.
/// Sound in one direction only: a returned witness really sees every
/// target, but a region thinner than the grid may be missed.
inline std::optional<Pose> set_visibility_witness(std::span<const int> ids, const SectorFov& fov,
                                                  const WorkspaceSpec& ws, const VisibilityQuery& q = {}) {
  require(q.grid_resolution > 0.0 && q.headings > 0, ErrorCode::InvalidArgument, "grid resolution must be positive");
  std::vector<Vec2> points;
  for (int id : ids) {
    auto it = std::find_if(ws.targets.begin(), ws.targets.end(), [id](const Target& t) { return t.id == id; });
    require(it != ws.targets.end(), ErrorCode::InvalidArgument, "unknown target id " + std::to_string(id));
    points.push_back(it->position);
  }
  const auto& b = ws.bounds;
  const auto nx = static_cast<std::size_t>(std::floor(b.width() / q.grid_resolution + 1e-9));
  const auto ny = static_cast<std::size_t>(std::floor(b.height() / q.grid_resolution + 1e-9));
  for (std::size_t i = 0; i <= nx; ++i) {
    for (std::size_t j = 0; j <= ny; ++j) {
      const Vec2 p{b.xmin + static_cast<double>(i) * q.grid_resolution,
                   b.ymin + static_cast<double>(j) * q.grid_resolution};
      bool reachable = true;
      for (auto x : points)
        if (distance(p, x) > fov.radius) reachable = false;
      if (!reachable || !in_free_space(p, q.footprint, ws)) continue;
      bool los = true;
      for (auto x : points)
        if (!line_of_sight(p, x, ws.obstacles)) los = false;
      if (!los) continue;
      for (std::size_t h = 0; h < q.headings; ++h) {
        const Pose pose{p.x, p.y, wrap_angle(2.0 * std::numbers::pi * static_cast<double>(h) / static_cast<double>(q.headings))};
        if (std::all_of(points.begin(), points.end(), [&](Vec2 x) { return in_fov(pose, fov, x); })) return pose;
      }
    }
  }
  return std::nullopt;
}

inline bool set_visibility_nonempty(std::span<const int> ids, const SectorFov& fov, const WorkspaceSpec& ws,
                                    const VisibilityQuery& q = {}) {
  return set_visibility_witness(ids, fov, ws, q).has_value();
}

inline void validate_workspace(const WorkspaceSpec& ws, double rho = kDefaultFootprint) {
  require(ws.bounds.width() > 0.0 && ws.bounds.height() > 0.0, ErrorCode::InvalidArgument, "empty bounds");
  for (std::size_t i = 0; i < ws.obstacles.size(); ++i) {
    const auto& poly = ws.obstacles[i];
    require(polygon_is_simple(poly), ErrorCode::DegenerateGeometry, "obstacle " + std::to_string(i) + " is not simple");
    for (auto v : poly)
      require(ws.bounds.contains(v), ErrorCode::InvalidArgument, "obstacle " + std::to_string(i) + " leaves bounds");
  }
  require(in_free_space(ws.start, rho, ws), ErrorCode::InvalidArgument, "start pose is not in free space");
  for (const auto& t : ws.targets) {
    bool free = ws.bounds.contains(t.position);
    for (const auto& poly : ws.obstacles)
      if (point_in_polygon(t.position, poly)) free = false;
    require(free, ErrorCode::InvalidArgument, "target " + std::to_string(t.id) + " is not in free space");
  }
}

}  // namespace hunt
