#pragma once

// Concrete scenario instances: a layout populated with targets whose
// classes and features are drawn from the Bayes net.

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hunt/bayes.hpp"
#include "hunt/bayes_io.hpp"
#include "hunt/error.hpp"
#include "hunt/geometry.hpp"
#include "hunt/rng.hpp"
#include "hunt/sim.hpp"
#include "hunt/workspace.hpp"

namespace hunt {

struct ScenarioSpec {
  std::string layout_ref = "human10x10";  // built-in name or layout file
  std::string net_ref;                    // empty: the default net
  PressureConfig pressure;                // fog_radius empty: take the layout's
  std::optional<std::size_t> target_count;
  double min_separation = 0.5;
  double clearance = 0.3;  // target distance from obstacles and bounds
  std::size_t max_attempts_per_target = 2000;
};

struct Scenario {
  WorkspaceSpec workspace;
  BayesNet net;
  SimConfig config;
};

/// Places `count` targets uniformly in free space, rejection sampling with
/// a minimum pairwise separation; classes ~ prior, features ~ CPTs.
inline WorkspaceSpec sample_targets(const WorkspaceSpec& base, const BayesNet& net, std::size_t count,
                                    std::uint64_t seed, double min_separation = 0.5, double clearance = 0.3,
                                    std::size_t max_attempts_per_target = 2000) {
  require(min_separation >= 0.0 && clearance >= 0.0, ErrorCode::InvalidArgument, "separation must be >= 0");
  WorkspaceSpec ws = base;
  ws.targets.clear();
  Rng pos_rng(derive_seed(seed, "scenario/positions"));
  Rng cls_rng(derive_seed(seed, "scenario/classes"));
  const auto& b = ws.bounds;
  const std::size_t cap = max_attempts_per_target * std::max<std::size_t>(count, 1);
  std::size_t tries = 0;
  while (ws.targets.size() < count) {
    if (++tries > cap)
      fail(ErrorCode::SamplingExhausted, "placed " + std::to_string(ws.targets.size()) + " of " +
                                             std::to_string(count) + " targets in " + ws.name);
    const Vec2 p{pos_rng.uniform(b.xmin, b.xmax), pos_rng.uniform(b.ymin, b.ymax)};
    if (!in_free_space(p, clearance, ws)) continue;
    if (distance(p, ws.start.position()) < min_separation) continue;
    bool close = false;
    for (const auto& t : ws.targets) close = close || distance(p, t.position) < min_separation;
    if (close) continue;
    auto [y, xs] = sample_instance(net, cls_rng);
    ws.targets.push_back(Target{static_cast<int>(ws.targets.size()), p, y, std::move(xs)});
  }
  return ws;
}

inline BayesNet resolve_net(const std::string& ref) {
  if (ref.empty() || ref == "default") return default_active_net();
  return load_bayes_net(ref);
}

/// Deterministic in (spec, seed). Layouts that pin their targets are used as is.
inline Scenario sample_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  const auto layout = resolve_layout(spec.layout_ref);
  Scenario s{layout.workspace, resolve_net(spec.net_ref), {}};
  s.config.pressure = spec.pressure;
  if (!s.config.pressure.fog_radius) s.config.pressure.fog_radius = layout.fog_radius;
  s.config.validate();
  if (layout.workspace.targets.empty()) {
    const auto count = spec.target_count.value_or(layout.target_count);
    s.workspace = sample_targets(layout.workspace, s.net, count, seed, spec.min_separation, spec.clearance,
                                 spec.max_attempts_per_target);
  }
  validate_workspace(s.workspace, s.config.sensors.footprint);
  return s;
}

inline nlohmann::json to_json(const ScenarioSpec& s) {
  return {{"layout", s.layout_ref},
          {"net", s.net_ref.empty() ? "default" : s.net_ref},
          {"horizon", s.pressure.horizon},
          {"budget", s.pressure.budget},
          {"fog_radius", s.pressure.fog_radius ? nlohmann::json(*s.pressure.fog_radius) : nlohmann::json(nullptr)},
          {"target_count", s.target_count ? nlohmann::json(*s.target_count) : nlohmann::json(nullptr)}};
}

}  // namespace hunt
