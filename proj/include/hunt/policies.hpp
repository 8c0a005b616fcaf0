#pragma once

// Low-level behaviours: wall following, boustrophedon coverage, random
// walk, forward exploration, target pursuit and feature interaction.
// Exploration behaviours only look at LocalSense so that the trajectory
// scorer can re-run them on a logged pose sequence.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hunt/bayes.hpp"
#include "hunt/geometry.hpp"
#include "hunt/rng.hpp"
#include "hunt/sim.hpp"

namespace hunt {

/// Egocentric range sensing at one pose.
struct LocalSense {
  Pose pose;
  bool blocked = false;  // the previous motion was rejected
  const WorkspaceSpec* map = nullptr;
  double ray_range = 3.0;
  double sensing_radius = 5.0;  // detection radius after fog
  double footprint = kDefaultFootprint;
  KinematicLimits limits;

  double ray(double relative_heading) const {
    return ray_cast(pose, pose.theta + relative_heading, ray_range, *map);
  }
  /// Shortest of eight rays around the agent.
  double nearest_wall() const {
    double d = ray_range;
    for (int i = 0; i < 8; ++i) d = std::min(d, ray(i * std::numbers::pi / 4.0));
    return d;
  }

  static LocalSense from(const SimView& v) {
    const auto& cfg = v.config();
    return LocalSense{v.pose(), v.last_blocked(), &v.map(), v.ray_range(), cfg.passive_fov().radius,
                      cfg.sensors.footprint, cfg.kinematics};
  }
};

/// Signed in-place turn toward `target`, landing exactly when within one step.
inline ActionDecision turn_toward(const Pose& pose, double target, const KinematicLimits& lim) {
  const double err = wrap_angle(target - pose.theta);
  return ActionDecision::turn(std::clamp(err / lim.dt, -lim.omega_max, lim.omega_max));
}

inline double snap_to_axis(double theta) {
  const double q = std::numbers::pi / 2.0;
  return wrap_angle(std::round(theta / q) * q);
}

inline bool axis_aligned(double theta, double tol = 1e-6) {
  return std::abs(wrap_angle(theta - snap_to_axis(theta))) <= tol;
}

// ---------------------------------------------------------------- wall follow

struct WallFollowParams {
  double band_low = 0.3;
  double band_high = 0.7;
  double front_stop = 0.5;
  double wall_seen = 1.0;
  double steer = 0.3;              // rad/s while correcting inside the band
  std::size_t corner_memory = 25;  // steps spent wrapping a lost wall
};

/// Right-hand wall following on three rays: ahead, right-forward, right.
class WallFollow {
 public:
  explicit WallFollow(WallFollowParams p = {}) : p_(p), since_wall_(p.corner_memory) {}

  void reset() { since_wall_ = p_.corner_memory; }

  ActionDecision act(const LocalSense& s) {
    const double front = s.ray(0.0);
    const double front_right = s.ray(-std::numbers::pi / 4.0);
    const double right = s.ray(-std::numbers::pi / 2.0);
    const auto& lim = s.limits;
    if (s.blocked || front < p_.front_stop || front_right < p_.band_low * std::numbers::sqrt2) {
      since_wall_ = 0;
      return ActionDecision::turn_left(lim.omega_max);
    }
    if (right <= p_.wall_seen && right < s.ray_range) {
      since_wall_ = 0;
      if (right < p_.band_low) return ActionDecision::forward(lim.v_max, p_.steer);
      if (right > p_.band_high) return ActionDecision::forward(lim.v_max, -p_.steer);
      return ActionDecision::forward(lim.v_max, 0.0);
    }
    if (since_wall_ < p_.corner_memory) {
      ++since_wall_;
      return ActionDecision::forward(lim.v_max, -lim.omega_max);
    }
    return ActionDecision::forward(lim.v_max, 0.0);
  }

  const WallFollowParams& params() const { return p_; }

 private:
  WallFollowParams p_;
  std::size_t since_wall_;
};

// ---------------------------------------------------------------- coverage

struct CoverageParams {
  double lane_factor = 1.5;  // lane offset as a multiple of the sensing radius
  double front_stop = 0.5;
};

/// Boustrophedon sweep: axis-aligned runs joined by U-turns.
class Coverage {
 public:
  enum class Phase { Align, Run, Turn1, Shift, Turn2 };

  explicit Coverage(CoverageParams p = {}) : p_(p) {}

  void reset(const LocalSense& s) {
    phase_ = Phase::Align;
    lane_ = snap_to_axis(s.pose.theta);
    target_ = lane_;
    sweep_ = s.ray(std::numbers::pi / 2.0) >= s.ray(-std::numbers::pi / 2.0) ? 1 : -1;
    started_ = true;
  }

  double lane_offset(const LocalSense& s) const { return p_.lane_factor * s.sensing_radius; }
  Phase phase() const { return phase_; }

  ActionDecision act(const LocalSense& s) {
    if (!started_) reset(s);
    const auto& lim = s.limits;
    const bool wall_ahead = s.blocked || s.ray(0.0) < p_.front_stop;
    switch (phase_) {
      case Phase::Align:
        if (aligned(s, target_)) {
          phase_ = Phase::Run;
          return act(s);
        }
        return turn_toward(s.pose, target_, lim);
      case Phase::Run:
        if (wall_ahead) {
          phase_ = Phase::Turn1;
          target_ = wrap_angle(lane_ + sweep_ * std::numbers::pi / 2.0);
          return rotate(s);
        }
        return ActionDecision::forward(lim.v_max, 0.0);
      case Phase::Turn1:
        if (aligned(s, target_)) {
          phase_ = Phase::Shift;
          shifted_ = 0.0;
          reverse_ = false;
          return act(s);
        }
        return rotate(s);
      case Phase::Shift:
        if (wall_ahead || shifted_ >= lane_offset(s) - 1e-9) {
          if (wall_ahead && shifted_ < 0.3 * lane_offset(s)) reverse_ = true;
          phase_ = Phase::Turn2;
          target_ = wrap_angle(lane_ + std::numbers::pi);
          return rotate(s);
        }
        shifted_ += lim.max_step();
        return ActionDecision::forward(lim.v_max, 0.0);
      case Phase::Turn2:
        if (aligned(s, target_)) {
          lane_ = target_;
          if (!reverse_) sweep_ = -sweep_;
          phase_ = Phase::Run;
          return act(s);
        }
        return rotate(s);
    }
    return ActionDecision::stop();
  }

 private:
  static bool aligned(const LocalSense& s, double target) { return std::abs(wrap_angle(target - s.pose.theta)) < 1e-6; }

  /// Turns in the sweep direction; the final step lands on the target.
  ActionDecision rotate(const LocalSense& s) const {
    const auto& lim = s.limits;
    double err = wrap_angle(target_ - s.pose.theta);
    if (sweep_ > 0 && err < 0.0) err += 2.0 * std::numbers::pi;
    if (sweep_ < 0 && err > 0.0) err -= 2.0 * std::numbers::pi;
    return ActionDecision::turn(std::clamp(err / lim.dt, -lim.omega_max, lim.omega_max));
  }

  CoverageParams p_;
  Phase phase_ = Phase::Align;
  double lane_ = 0.0;
  double target_ = 0.0;
  int sweep_ = 1;
  double shifted_ = 0.0;
  bool reverse_ = false;
  bool started_ = false;
};

// ---------------------------------------------------------------- random walk

struct RandomWalkParams {
  double perturbation = 15.0 * std::numbers::pi / 180.0;  // half-width of the heading kick
};

/// Forward with a uniform heading kick each step, clipped to the turn-rate
/// limit; after a blocked move, turn in place to a fresh uniform heading.
class RandomWalk {
 public:
  explicit RandomWalk(RandomWalkParams p = {}) : p_(p) {}

  void reset() { heading_.reset(); }
  bool resampling() const { return heading_.has_value(); }
  std::size_t resamples() const { return resamples_; }

  ActionDecision act(const LocalSense& s, Rng& rng) {
    const auto& lim = s.limits;
    if (s.blocked) {
      heading_ = rng.angle();
      ++resamples_;
    }
    if (heading_) {
      if (std::abs(wrap_angle(*heading_ - s.pose.theta)) > 1e-9) return turn_toward(s.pose, *heading_, lim);
      heading_.reset();
    }
    const double kick = rng.uniform(-p_.perturbation, p_.perturbation);
    return ActionDecision::forward(lim.v_max, std::clamp(kick, -lim.max_turn(), lim.max_turn()) / lim.dt);
  }

 private:
  RandomWalkParams p_;
  std::optional<double> heading_;
  std::size_t resamples_ = 0;
};

// ---------------------------------------------------------------- forward explore

struct ForwardExploreParams {
  double forward_probability = 0.9;
  std::size_t turn_steps = 10;  // 90 degrees at the turn-rate limit
};

/// Mostly straight ahead; occasionally a 90 degree turn, always one after a
/// blocked move.
class ForwardMotion {
 public:
  explicit ForwardMotion(ForwardExploreParams p = {}) : p_(p) {}

  void reset() { left_ = 0; }
  std::size_t forward_choices() const { return forward_; }
  std::size_t turn_choices() const { return turns_; }

  ActionDecision act(const LocalSense& s, Rng& rng) {
    const auto& lim = s.limits;
    if (left_ == 0) {
      if (s.blocked) {
        start_turn(rng.bernoulli(0.5) ? 1 : -1);
      } else {
        const double u = rng.uniform();
        if (u < p_.forward_probability) {
          ++forward_;
          return ActionDecision::forward(lim.v_max, 0.0);
        }
        start_turn(u < p_.forward_probability + 0.5 * (1.0 - p_.forward_probability) ? 1 : -1);
      }
    }
    --left_;
    return ActionDecision::turn(dir_ * lim.omega_max);
  }

 private:
  void start_turn(int dir) {
    dir_ = dir;
    left_ = p_.turn_steps;
    ++turns_;
  }

  ForwardExploreParams p_;
  std::size_t left_ = 0;
  int dir_ = 1;
  std::size_t forward_ = 0;
  std::size_t turns_ = 0;
};

// ---------------------------------------------------------------- greedy core

inline Vec2 target_offset(const Pose& pose, Vec2 x) { return x - pose.position(); }

/// Nearest by Euclidean distance; ties go to the lower id.
inline std::optional<int> nearest_target(const Pose& pose, const std::vector<KnownTarget>& candidates) {
  std::optional<int> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& t : candidates) {
    const double d = distance(pose.position(), t.position);
    if (d < best_d || (d == best_d && best && t.id < *best)) {
      best_d = d;
      best = t.id;
    }
  }
  return best;
}

/// Proportional heading control toward x; rotates in place while the
/// bearing is outside the measurement sector's half angle.
inline ActionDecision pursue_action(const Pose& pose, Vec2 x, const KinematicLimits& lim, double half_angle,
                                    double stop_range) {
  const Vec2 d = x - pose.position();
  const double err = wrap_angle(std::atan2(d.y, d.x) - pose.theta);
  if (std::abs(err) > 0.8 * half_angle) return ActionDecision::turn(std::clamp(err / lim.dt, -lim.omega_max, lim.omega_max));
  const double range = norm(d);
  const double v = std::clamp((range - stop_range) / lim.dt, 0.0, lim.v_max);
  const double w = std::clamp(err / lim.dt, -lim.omega_max, lim.omega_max);
  if (v <= 0.0) return ActionDecision::turn(w);
  return ActionDecision::forward(v, w);
}

struct GreedyParams {
  double confidence = 0.85;        // c*
  std::size_t pursuit_slack = 60;  // extra steps before a pursuit is abandoned
  std::size_t abandon_steps = 400; // how long an abandoned target is ignored
};

/// The interact-first, pursue-second outer loop shared by the heuristic
/// strategies.
class GreedyCore {
 public:
  explicit GreedyCore(GreedyParams p = {}) : p_(p) {}

  const GreedyParams& params() const { return p_; }

  /// Reveal-or-classify on the nearest unclassified target in the
  /// measurement sector.
  std::optional<Decision> interact(const SimView& v) const {
    std::vector<KnownTarget> cands;
    for (int id : v.interactable()) {
      auto t = v.known(id);
      if (t && !t->classified_as) cands.push_back(*t);
    }
    auto id = nearest_target(v.pose(), cands);
    if (!id) return std::nullopt;
    return Decision{ActionDecision::stop(), interact_test(v.net(), v.evidence(*id), *id, v.budget_left(), p_.confidence),
                    "interact"};
  }

  static TestDecision interact_test(const BayesNet& net, const Evidence& ev, int id, std::size_t budget_left,
                                    double confidence) {
    const auto post = posterior(net, ev);
    if (post.max() >= confidence || ev.observed_count() >= net.feature_count() || budget_left == 0)
      return TestDecision::classify(id, post.argmax());
    return TestDecision::reveal(id);
  }

  /// Candidates for pursuit: visible, unclassified and not abandoned.
  std::vector<KnownTarget> pursuit_candidates(const SimView& v) const {
    std::vector<KnownTarget> cands;
    for (int id : v.visible()) {
      auto t = v.known(id);
      if (!t || t->classified_as) continue;
      auto it = abandoned_.find(id);
      if (it != abandoned_.end() && v.step() < it->second) continue;
      cands.push_back(*t);
    }
    return cands;
  }

  std::optional<Decision> pursue(const SimView& v) {
    auto cands = pursuit_candidates(v);
    auto id = nearest_target(v.pose(), cands);
    if (!id) {
      chasing_.reset();
      return std::nullopt;
    }
    const auto& cfg = v.config();
    const auto target = *v.known(*id);
    if (chasing_ != id) {
      chasing_ = id;
      chase_steps_ = 0;
      chase_limit_ = static_cast<std::size_t>(3.0 * distance(v.pose().position(), target.position) /
                                              cfg.kinematics.max_step()) +
                     p_.pursuit_slack;
      escape_ = 0;
    }
    if (++chase_steps_ > chase_limit_) {
      abandoned_[*id] = v.step() + p_.abandon_steps;
      chasing_.reset();
      return std::nullopt;
    }
    const auto lim = cfg.kinematics;
    if (v.last_blocked() && escape_ == 0) {
      escape_ = 12;
      escape_dir_ = v.ray(std::numbers::pi / 2.0) >= v.ray(-std::numbers::pi / 2.0) ? 1 : -1;
    }
    if (escape_ > 0) {
      --escape_;
      if (escape_ >= 6) return Decision{ActionDecision::turn(escape_dir_ * lim.omega_max), {}, "pursue"};
      return Decision{ActionDecision::forward(lim.v_max, 0.0), {}, "pursue"};
    }
    return Decision{pursue_action(v.pose(), target.position, lim, 0.5 * cfg.sensors.interact.angle_of_view,
                                  0.6 * cfg.sensors.interact.radius),
                    {},
                    "pursue"};
  }

 private:
  GreedyParams p_;
  std::map<int, std::size_t> abandoned_;  // id -> step until which it is ignored
  std::optional<int> chasing_;
  std::size_t chase_steps_ = 0;
  std::size_t chase_limit_ = 0;
  std::size_t escape_ = 0;
  int escape_dir_ = 1;
};

}  // namespace hunt
