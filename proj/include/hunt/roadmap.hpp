#pragma once

// Roadmaps over the free workspace: probabilistic roadmaps, vertical cell
// decomposition, observation poses for targets, and Dijkstra.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "hunt/error.hpp"
#include "hunt/geometry.hpp"
#include "hunt/rng.hpp"

namespace hunt {

struct RoadmapEdge {
  std::size_t to = 0;
  double length = 0.0;
};

struct Roadmap {
  std::vector<Vec2> nodes;
  std::vector<std::vector<RoadmapEdge>> adjacency;
  std::map<int, std::size_t> target_nodes;  // target id -> observation node
  std::map<int, double> target_headings;     // target id -> heading facing the target
  double footprint = kDefaultFootprint;

  std::size_t size() const noexcept { return nodes.size(); }

  std::size_t add_node(Vec2 p) {
    nodes.push_back(p);
    adjacency.emplace_back();
    return nodes.size() - 1;
  }

  bool has_edge(std::size_t a, std::size_t b) const {
    return std::any_of(adjacency[a].begin(), adjacency[a].end(), [b](const RoadmapEdge& e) { return e.to == b; });
  }

  void add_edge(std::size_t a, std::size_t b) {
    if (a == b || has_edge(a, b)) return;
    const double len = distance(nodes[a], nodes[b]);
    if (len <= 0.0) return;
    adjacency[a].push_back({b, len});
    adjacency[b].push_back({a, len});
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& a : adjacency) n += a.size();
    return n / 2;
  }

  /// Adds an edge if the swept footprint is collision free.
  bool try_connect(std::size_t a, std::size_t b, const WorkspaceSpec& ws) {
    if (a == b || has_edge(a, b)) return false;
    if (!segment_free(nodes[a], nodes[b], footprint, ws)) return false;
    add_edge(a, b);
    return true;
  }

  /// Connects node `a` to every existing node it can reach in a straight line.
  void connect_visible(std::size_t a, const WorkspaceSpec& ws) {
    for (std::size_t b = 0; b < nodes.size(); ++b) try_connect(a, b, ws);
  }
};

/// A free pose within the measurement sector's reach with line of sight to
/// x, found by seeded local sampling.
inline std::optional<Pose> find_observation_pose(const WorkspaceSpec& ws, Vec2 x, const SectorFov& interact,
                                                 double footprint, Rng& rng, std::size_t max_samples = 4000) {
  const double r_lo = std::min(0.3, 0.5 * interact.radius);
  const double r_hi = 0.85 * interact.radius;
  for (std::size_t i = 0; i < max_samples; ++i) {
    const double r = rng.uniform(r_lo, r_hi);
    const double a = rng.angle();
    const Vec2 p{x.x + r * std::cos(a), x.y + r * std::sin(a)};
    if (!in_free_space(p, footprint, ws) || !line_of_sight(p, x, ws.obstacles)) continue;
    const Vec2 d = x - p;
    return Pose{p.x, p.y, std::atan2(d.y, d.x)};
  }
  return std::nullopt;
}

/// Adds an observation node for the target and links it into the roadmap.
inline std::size_t attach_target(Roadmap& rm, const WorkspaceSpec& ws, int id, Vec2 x, const SectorFov& interact,
                                  std::uint64_t seed) {
  Rng rng(derive_seed(seed, "observe/" + std::to_string(id)));
  auto pose = find_observation_pose(ws, x, interact, rm.footprint, rng);
  require(pose.has_value(), ErrorCode::TargetUnreachable, "no observation pose for target " + std::to_string(id));
  const auto node = rm.add_node(pose->position());
  rm.connect_visible(node, ws);
  rm.target_nodes[id] = node;
  rm.target_headings[id] = pose->theta;
  return node;
}

struct PrmParams {
  std::size_t samples = 500;
  std::size_t neighbors = 8;
  std::uint64_t seed = 0;
};

/// Uniform free samples joined to their k nearest neighbours.
inline Roadmap prm_build(const WorkspaceSpec& ws, const PrmParams& p, double footprint = kDefaultFootprint) {
  require(p.samples >= 2, ErrorCode::InvalidArgument, "PRM needs at least 2 samples");
  Roadmap rm;
  rm.footprint = footprint;
  Rng rng(derive_seed(p.seed, "prm"));
  const auto& b = ws.bounds;
  const std::size_t cap = 200 * p.samples;
  for (std::size_t tries = 0; rm.size() < p.samples && tries < cap; ++tries) {
    const Vec2 q{rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax)};
    if (in_free_space(q, footprint, ws)) rm.add_node(q);
  }
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < rm.size(); ++i) {
    order.clear();
    for (std::size_t j = 0; j < rm.size(); ++j)
      if (j != i) order.emplace_back(distance(rm.nodes[i], rm.nodes[j]), j);
    const auto k = std::min(p.neighbors, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    for (std::size_t n = 0; n < k; ++n) rm.try_connect(i, order[n].second, ws);
  }
  return rm;
}

/// PRM plus the start node and one observation node per target.
inline Roadmap prm_build(const WorkspaceSpec& ws, const PrmParams& p, const SectorFov& interact,
                         double footprint, std::size_t* start_node) {
  auto rm = prm_build(ws, p, footprint);
  const auto s = rm.add_node(ws.start.position());
  rm.connect_visible(s, ws);
  if (start_node) *start_node = s;
  for (const auto& t : ws.targets) attach_target(rm, ws, t.id, t.position, interact, p.seed);
  return rm;
}

// ---------------------------------------------------------------- cells

/// Free-space trapezoid between two vertical lines; bottom and top are
/// straight lines given by their heights at xl and xr.
struct Cell {
  double xl = 0.0, xr = 0.0;
  double bl = 0.0, br = 0.0;  // bottom at xl, xr
  double tl = 0.0, tr = 0.0;  // top at xl, xr

  double bottom(double x) const { return xr > xl ? bl + (br - bl) * (x - xl) / (xr - xl) : bl; }
  double top(double x) const { return xr > xl ? tl + (tr - tl) * (x - xl) / (xr - xl) : tl; }
  bool contains(Vec2 p, double eps = 0.0) const {
    return p.x >= xl - eps && p.x <= xr + eps && p.y >= bottom(p.x) - eps && p.y <= top(p.x) + eps;
  }
  Vec2 centroid() const { return {0.25 * (xl + xl + xr + xr), 0.25 * (bl + tl + br + tr)}; }
};

struct CellAdjacency {
  std::size_t a = 0, b = 0;  // a on the left
  double x = 0.0;
  double lo = 0.0, hi = 0.0;  // shared vertical segment
};

struct CellDecomposition {
  std::vector<Cell> cells;
  std::vector<CellAdjacency> adjacency;
  Roadmap roadmap;
};

namespace detail {
struct Bound {
  bool is_edge = false;
  Vec2 a, b;     // edge endpoints, a.x < b.x
  double y = 0;  // constant when not an edge
  double at(double x) const { return is_edge ? a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x) : y; }
};
struct Interval {
  Bound lo, hi;
};

/// Free vertical intervals at abscissa xm (no vertex has x == xm).
inline std::vector<Interval> free_intervals(const WorkspaceSpec& ws, double xm) {
  struct Crossing {
    double y;
    Bound edge;
  };
  std::vector<Interval> blocked;
  for (const auto& poly : ws.obstacles) {
    std::vector<Crossing> cs;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
      if ((a.x < xm) == (b.x < xm)) continue;
      if (a.x > b.x) std::swap(a, b);
      Bound e{true, a, b, 0.0};
      cs.push_back({e.at(xm), e});
    }
    std::sort(cs.begin(), cs.end(), [](const Crossing& l, const Crossing& r) { return l.y < r.y; });
    for (std::size_t i = 0; i + 1 < cs.size(); i += 2) blocked.push_back({cs[i].edge, cs[i + 1].edge});
  }
  std::sort(blocked.begin(), blocked.end(),
            [xm](const Interval& l, const Interval& r) { return l.lo.at(xm) < r.lo.at(xm); });
  std::vector<Interval> out;
  Bound cursor{false, {}, {}, ws.bounds.ymin};
  for (const auto& iv : blocked) {
    if (iv.lo.at(xm) > cursor.at(xm) + 1e-12) out.push_back({cursor, iv.lo});
    if (iv.hi.at(xm) > cursor.at(xm)) cursor = iv.hi;
  }
  Bound top{false, {}, {}, ws.bounds.ymax};
  if (top.at(xm) > cursor.at(xm) + 1e-12) out.push_back({cursor, top});
  return out;
}
}  // namespace detail

/// Vertical decomposition: slabs between consecutive vertex abscissae,
/// merged across slab lines that carry no vertex on the shared boundary.
/// Vertical obstacle edges fall on slab lines and need no perturbation.
inline CellDecomposition celldecomp_build(const WorkspaceSpec& ws, double footprint = kDefaultFootprint) {
  for (std::size_t i = 0; i < ws.obstacles.size(); ++i) {
    require(polygon_is_simple(ws.obstacles[i]), ErrorCode::DegenerateGeometry,
            "obstacle " + std::to_string(i) + " is not a simple polygon");
    for (auto v : ws.obstacles[i])
      require(ws.bounds.contains(v), ErrorCode::DegenerateGeometry, "obstacle " + std::to_string(i) + " leaves bounds");
  }
  std::vector<double> xs{ws.bounds.xmin, ws.bounds.xmax};
  std::vector<Vec2> vertices;
  for (const auto& poly : ws.obstacles)
    for (auto v : poly) {
      vertices.push_back(v);
      if (v.x > ws.bounds.xmin && v.x < ws.bounds.xmax) xs.push_back(v.x);
    }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  CellDecomposition out;
  std::vector<std::size_t> prev_cells;
  std::vector<detail::Interval> prev;
  for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
    const double x0 = xs[s], x1 = xs[s + 1];
    auto ivs = detail::free_intervals(ws, 0.5 * (x0 + x1));
    std::vector<std::size_t> cur_cells(ivs.size());
    for (std::size_t i = 0; i < ivs.size(); ++i) {
      const double lo = ivs[i].lo.at(x0), hi = ivs[i].hi.at(x0);
      std::optional<std::size_t> merged;
      for (std::size_t j = 0; j < prev.size(); ++j) {
        const auto& c = out.cells[prev_cells[j]];
        const bool same = std::abs(lo - c.br) < 1e-9 && std::abs(hi - c.tr) < 1e-9;
        const bool vertex_on_line = std::any_of(vertices.begin(), vertices.end(), [&](Vec2 v) {
          return v.x == x0 && v.y >= lo - 1e-9 && v.y <= hi + 1e-9;
        });
        if (same && !vertex_on_line) merged = prev_cells[j];
      }
      if (merged) {
        auto& c = out.cells[*merged];
        c.xr = x1;
        c.br = ivs[i].lo.at(x1);
        c.tr = ivs[i].hi.at(x1);
        cur_cells[i] = *merged;
      } else {
        out.cells.push_back(Cell{x0, x1, lo, ivs[i].lo.at(x1), hi, ivs[i].hi.at(x1)});
        cur_cells[i] = out.cells.size() - 1;
      }
    }
    for (std::size_t i = 0; i < ivs.size(); ++i) {
      const double lo = ivs[i].lo.at(x0), hi = ivs[i].hi.at(x0);
      for (std::size_t j = 0; j < prev.size(); ++j) {
        if (prev_cells[j] == cur_cells[i]) continue;
        const auto& c = out.cells[prev_cells[j]];
        const double olo = std::max(lo, c.br), ohi = std::min(hi, c.tr);
        if (ohi - olo > 1e-12) out.adjacency.push_back({prev_cells[j], cur_cells[i], x0, olo, ohi});
      }
    }
    prev = std::move(ivs);
    prev_cells = std::move(cur_cells);
  }

  auto& rm = out.roadmap;
  rm.footprint = footprint;
  std::vector<std::vector<std::size_t>> cell_nodes(out.cells.size());
  auto add_free = [&](Vec2 p) -> std::optional<std::size_t> {
    if (!in_free_space(p, footprint, ws)) return std::nullopt;
    return rm.add_node(p);
  };
  for (std::size_t c = 0; c < out.cells.size(); ++c)
    if (auto n = add_free(out.cells[c].centroid())) cell_nodes[c].push_back(*n);
  for (const auto& adj : out.adjacency) {
    if (auto n = add_free({adj.x, 0.5 * (adj.lo + adj.hi)})) {
      cell_nodes[adj.a].push_back(*n);
      cell_nodes[adj.b].push_back(*n);
    }
  }
  for (const auto& nodes : cell_nodes)
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = i + 1; j < nodes.size(); ++j) rm.try_connect(nodes[i], nodes[j], ws);
  return out;
}

/// Index of the cell containing p, or nullopt. Points on shared boundaries
/// report the first match.
inline std::optional<std::size_t> locate_cell(const CellDecomposition& cd, Vec2 p) {
  for (std::size_t i = 0; i < cd.cells.size(); ++i)
    if (cd.cells[i].contains(p)) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------- dijkstra

struct ShortestPaths {
  std::size_t source = 0;
  std::vector<double> dist;
  std::vector<std::optional<std::size_t>> pred;

  bool reachable(std::size_t v) const { return std::isfinite(dist.at(v)); }

  /// Node sequence from the source to v; empty when unreachable.
  std::vector<std::size_t> path_to(std::size_t v) const {
    if (!reachable(v)) return {};
    std::vector<std::size_t> path{v};
    while (path.back() != source) path.push_back(*pred[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
  }
};

/// Nonnegative-weight shortest paths. Equal-length alternatives resolve to
/// the smaller predecessor index.
inline ShortestPaths dijkstra(const Roadmap& rm, std::size_t source) {
  require(source < rm.size(), ErrorCode::InvalidArgument, "source node out of range");
  ShortestPaths sp;
  sp.source = source;
  sp.dist.assign(rm.size(), std::numeric_limits<double>::infinity());
  sp.pred.assign(rm.size(), std::nullopt);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  sp.dist[source] = 0.0;
  pq.push({0.0, source});
  std::vector<bool> done(rm.size(), false);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = true;
    for (const auto& e : rm.adjacency[u]) {
      const double nd = d + e.length;
      auto& cur = sp.dist[e.to];
      if (nd < cur || (nd == cur && !done[e.to] && sp.pred[e.to] && u < *sp.pred[e.to])) {
        cur = nd;
        sp.pred[e.to] = u;
        pq.push({nd, e.to});
      }
    }
  }
  return sp;
}

}  // namespace hunt
