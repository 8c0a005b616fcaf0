#pragma once

// Log-likelihood of a trajectory under a behavioural model. Each logged
// action is discretized; the model reconstructs its own state from the log
// and assigns a probability to the observed class. Greedy steps (testing,
// or a visible unclassified target) are scored identically by every model,
// so the comparison rests on how the agent explores.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "hunt/error.hpp"
#include "hunt/policies.hpp"
#include "hunt/sim.hpp"

namespace hunt {

enum class ActionClass { Stop, Straight, VeerLeft, VeerRight, TurnLeft, TurnRight };
inline constexpr std::size_t kActionClasses = 6;

inline ActionClass classify_action(const ActionDecision& a, const KinematicLimits& lim) {
  constexpr double kStraightDeg = 1.0;
  switch (a.kind) {
    case ActionKind::Stop: return ActionClass::Stop;
    case ActionKind::TurnLeft: return a.angular == 0.0 ? ActionClass::Stop : ActionClass::TurnLeft;
    case ActionKind::TurnRight: return a.angular == 0.0 ? ActionClass::Stop : ActionClass::TurnRight;
    case ActionKind::Forward: {
      if (a.linear == 0.0) return a.angular == 0.0 ? ActionClass::Stop : (a.angular > 0 ? ActionClass::TurnLeft : ActionClass::TurnRight);
      const double deg = a.angular * lim.dt * 180.0 / std::numbers::pi;
      if (std::abs(deg) < kStraightDeg) return ActionClass::Straight;
      return deg > 0 ? ActionClass::VeerLeft : ActionClass::VeerRight;
    }
  }
  return ActionClass::Stop;
}

enum class LoglikModel { AdaptiveSwitch, ForwardExplore };

constexpr std::string_view to_string(LoglikModel m) {
  return m == LoglikModel::AdaptiveSwitch ? "adaptive_switch" : "forward_explore";
}

inline LoglikModel parse_loglik_model(std::string_view s) {
  if (s == "adaptive_switch") return LoglikModel::AdaptiveSwitch;
  if (s == "forward_explore") return LoglikModel::ForwardExplore;
  fail(ErrorCode::InvalidArgument, "unknown model '" + std::string(s) + "' (adaptive_switch|forward_explore)");
}

struct LoglikParams {
  double slack = 0.05;  // epsilon
  std::size_t switch_steps = 150;
  WallFollowParams wall;
  CoverageParams coverage;
  ForwardExploreParams forward;
  double greedy_half_angle_factor = 0.5;
};

using ClassDist = std::array<double, kActionClasses>;

namespace detail {
inline ClassDist one_hot(ActionClass c) {
  ClassDist d{};
  d[static_cast<std::size_t>(c)] = 1.0;
  return d;
}

/// (1-eps) q + eps (1-q)/(C-1): one-hot q gives 1-eps on the predicted class.
inline double emission(const ClassDist& q, ActionClass c, double eps) {
  const double qc = q[static_cast<std::size_t>(c)];
  return std::log((1.0 - eps) * qc + eps * (1.0 - qc) / static_cast<double>(kActionClasses - 1));
}

inline double logsumexp(const std::array<double, 3>& a) {
  const double m = *std::max_element(a.begin(), a.end());
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a[0] - m) + std::exp(a[1] - m) + std::exp(a[2] - m));
}

inline bool is_turn(ActionClass c) { return c == ActionClass::TurnLeft || c == ActionClass::TurnRight; }

/// Recovers per-step context from a log: pose before the step, previous
/// blocked flag, what was visible and what was already classified.
struct Replayer {
  const TrajectoryLog& log;
  WorkspaceSpec map;
  Pose pose;
  bool blocked = false;
  std::vector<int> visible;
  std::vector<int> interact;
  std::set<int> classified;

  explicit Replayer(const TrajectoryLog& l) : log(l), map(l.workspace) {
    map.targets.clear();
    pose = l.workspace.start;
    pose.theta = wrap_angle(pose.theta);
    visible = visible_targets(pose, l.config.passive_fov(), l.workspace);
    for (int id : visible)
      if (target_visible(pose, l.config.sensors.interact, l.workspace, l.workspace.targets.at(static_cast<std::size_t>(id)).position))
        interact.push_back(id);
  }

  LocalSense sense() const {
    const auto& c = log.config;
    return LocalSense{pose, blocked, &map, c.ray_range(), c.passive_fov().radius, c.sensors.footprint, c.kinematics};
  }

  std::optional<int> pursuit_target() const {
    std::vector<KnownTarget> cands;
    for (int id : visible)
      if (!classified.count(id)) cands.push_back({id, log.workspace.targets.at(static_cast<std::size_t>(id)).position, {}, {}});
    return nearest_target(pose, cands);
  }

  bool greedy(const LogRow& r) const {
    if (r.test.kind != TestKind::None) return true;
    for (int id : interact)
      if (!classified.count(id)) return true;
    return pursuit_target().has_value();
  }

  void advance(const LogRow& r) {
    pose = r.pose;
    blocked = r.blocked;
    visible = r.visible;
    interact = r.interact;
    if (r.test.kind == TestKind::Stop) classified.insert(r.test.target);
  }
};
}  // namespace detail

inline double trajectory_log_likelihood(const TrajectoryLog& log, LoglikModel model, const LoglikParams& p = {}) {
  require(p.slack > 0.0 && p.slack < 1.0, ErrorCode::InvalidArgument, "slack must lie in (0, 1)");
  const auto check = [&](int id) {
    require(id >= 0 && static_cast<std::size_t>(id) < log.workspace.targets.size(), ErrorCode::SchemaMismatch,
            "log references unknown target " + std::to_string(id));
  };
  for (const auto& r : log.rows) {
    for (int id : r.visible) check(id);
    if (r.test.kind != TestKind::None) check(r.test.target);
  }
  const double eps = p.slack;
  const auto& lim = log.config.kinematics;
  detail::Replayer rp(log);
  double greedy_ll = 0.0;

  // ForwardExplore state.
  std::size_t fe_left = 0;
  ActionClass fe_dir = ActionClass::TurnLeft;
  double fe_ll = 0.0;

  // AdaptiveSwitch state: HMM over {wall, coverage, random}.
  const double lstay = std::log(1.0 - 1.0 / static_cast<double>(p.switch_steps));
  const double lmove = std::log(0.5 / static_cast<double>(p.switch_steps));
  std::array<double, 3> alpha{std::log(1.0 / 3.0), std::log(1.0 / 3.0), std::log(1.0 / 3.0)};
  WallFollow wall(p.wall);
  ActionClass last_explore = ActionClass::Stop;
  ActionClass last_turn = ActionClass::TurnLeft;
  std::size_t straight_run = 0;
  bool in_greedy = false;

  for (const auto& row : log.rows) {
    const auto cls = classify_action(row.action, lim);
    if (rp.greedy(row)) {
      ActionClass pred = ActionClass::Stop;
      if (row.test.kind == TestKind::None) {
        if (auto id = rp.pursuit_target()) {
          const auto& cfg = log.config;
          pred = classify_action(pursue_action(rp.pose, log.workspace.targets.at(static_cast<std::size_t>(*id)).position, lim,
                                               p.greedy_half_angle_factor * cfg.sensors.interact.angle_of_view,
                                               0.6 * cfg.sensors.interact.radius)
                                     .clipped(lim),
                                 lim);
        }
      }
      greedy_ll += detail::emission(detail::one_hot(pred), cls, eps);
      fe_left = 0;
      in_greedy = true;
      rp.advance(row);
      continue;
    }
    const auto sense = rp.sense();
    if (model == LoglikModel::ForwardExplore) {
      ClassDist q{};
      if (fe_left > 0) {
        q = detail::one_hot(fe_dir);
      } else if (sense.blocked) {
        q[static_cast<std::size_t>(ActionClass::TurnLeft)] = 0.5;
        q[static_cast<std::size_t>(ActionClass::TurnRight)] = 0.5;
      } else {
        const double f = p.forward.forward_probability;
        q[static_cast<std::size_t>(ActionClass::Straight)] = f;
        q[static_cast<std::size_t>(ActionClass::TurnLeft)] = 0.5 * (1.0 - f);
        q[static_cast<std::size_t>(ActionClass::TurnRight)] = 0.5 * (1.0 - f);
      }
      fe_ll += detail::emission(q, cls, eps);
      if (fe_left > 0) {
        fe_left = cls == fe_dir ? fe_left - 1 : 0;
      } else if (detail::is_turn(cls)) {
        fe_dir = cls;
        fe_left = p.forward.turn_steps - 1;
      }
    } else {
      if (in_greedy) {
        const double mass = detail::logsumexp(alpha);
        alpha.fill(mass + std::log(1.0 / 3.0));
      }
      std::array<ClassDist, 3> q{};
      // Wall following: deterministic shadow.
      q[0] = detail::one_hot(classify_action(wall.act(sense).clipped(lim), lim));
      // Coverage: straight runs, in-place turns at walls and after a lane shift.
      {
        const double front = sense.ray(0.0);
        const double offset = p.coverage.lane_factor * sense.sensing_radius;
        const auto shift_steps = static_cast<std::size_t>(std::ceil(offset / lim.max_step() - 1e-9));
        if (detail::is_turn(last_explore) && !axis_aligned(sense.pose.theta)) {
          q[1] = detail::one_hot(last_explore);
        } else if (sense.blocked || front < p.coverage.front_stop) {
          q[1][static_cast<std::size_t>(ActionClass::TurnLeft)] = 0.5;
          q[1][static_cast<std::size_t>(ActionClass::TurnRight)] = 0.5;
        } else if (straight_run == shift_steps) {
          q[1][static_cast<std::size_t>(last_turn)] = 0.5;
          q[1][static_cast<std::size_t>(ActionClass::Straight)] = 0.5;
        } else {
          q[1] = detail::one_hot(ActionClass::Straight);
        }
      }
      // Random walk: kicked forward motion, in-place turns after a block.
      {
        auto& r = q[2];
        const double straight = 1.0 / 15.0, veer = 7.0 / 15.0;
        if (sense.blocked) {
          r[static_cast<std::size_t>(ActionClass::TurnLeft)] = 0.5;
          r[static_cast<std::size_t>(ActionClass::TurnRight)] = 0.5;
        } else if (detail::is_turn(last_explore)) {
          r[static_cast<std::size_t>(last_explore)] = 0.8;
          r[static_cast<std::size_t>(ActionClass::Straight)] = 0.2 * straight;
          r[static_cast<std::size_t>(ActionClass::VeerLeft)] = 0.2 * veer;
          r[static_cast<std::size_t>(ActionClass::VeerRight)] = 0.2 * veer;
        } else {
          r[static_cast<std::size_t>(ActionClass::Straight)] = straight;
          r[static_cast<std::size_t>(ActionClass::VeerLeft)] = veer;
          r[static_cast<std::size_t>(ActionClass::VeerRight)] = veer;
        }
      }
      std::array<double, 3> next{};
      for (std::size_t g = 0; g < 3; ++g) {
        std::array<double, 3> in{};
        for (std::size_t h = 0; h < 3; ++h) in[h] = alpha[h] + (h == g ? lstay : lmove);
        next[g] = detail::logsumexp(in) + detail::emission(q[g], cls, eps);
      }
      alpha = next;
    }
    if (detail::is_turn(cls)) {
      last_turn = cls;
      straight_run = 0;
    } else if (cls == ActionClass::Straight) {
      ++straight_run;
    } else {
      straight_run = 0;
    }
    last_explore = cls;
    in_greedy = false;
    rp.advance(row);
  }
  if (model == LoglikModel::ForwardExplore) return greedy_ll + fe_ll;
  const bool any_explore = std::any_of(alpha.begin(), alpha.end(), [](double a) { return a != std::log(1.0 / 3.0); });
  return greedy_ll + (any_explore ? detail::logsumexp(alpha) : 0.0);
}

}  // namespace hunt
