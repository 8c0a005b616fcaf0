#pragma once

// Heuristic strategies: AdaptiveSwitch, ForwardExplore and the standalone
// exploration heuristics, all sharing the greedy interact/pursue core.

#include <array>
#include <memory>
#include <numeric>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hunt/error.hpp"
#include "hunt/policies.hpp"
#include "hunt/sim.hpp"

namespace hunt {

enum class StrategyId { AdaptiveSwitch, ForwardExplore, WallFollow, Coverage, RandomWalk, PlannerPrm, PlannerCellDecomp };

constexpr std::string_view to_string(StrategyId id) {
  switch (id) {
    case StrategyId::AdaptiveSwitch: return "adaptive_switch";
    case StrategyId::ForwardExplore: return "forward_explore";
    case StrategyId::WallFollow: return "wall_follow";
    case StrategyId::Coverage: return "coverage";
    case StrategyId::RandomWalk: return "random_walk";
    case StrategyId::PlannerPrm: return "planner_prm";
    case StrategyId::PlannerCellDecomp: return "planner_celldecomp";
  }
  return "?";
}

inline constexpr std::array kAllStrategies = {StrategyId::AdaptiveSwitch, StrategyId::ForwardExplore,
                                              StrategyId::WallFollow,     StrategyId::Coverage,
                                              StrategyId::RandomWalk,     StrategyId::PlannerPrm,
                                              StrategyId::PlannerCellDecomp};

inline StrategyId parse_strategy(std::string_view s) {
  for (auto id : kAllStrategies)
    if (to_string(id) == s) return id;
  fail(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(s) + "'");
}

/// Exploration policy index. Slot 0 of the probability vector is wall
/// following (slot 1 in the 1-based listing of the switching rule).
enum class Explorer : int { None = -1, WallFollow = 0, Coverage = 1, RandomWalk = 2 };

constexpr std::string_view to_string(Explorer e) {
  switch (e) {
    case Explorer::None: return "none";
    case Explorer::WallFollow: return "wall_follow";
    case Explorer::Coverage: return "coverage";
    case Explorer::RandomWalk: return "random_walk";
  }
  return "?";
}

struct SwitchParams {
  std::array<double, 3> initial{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::size_t max_steps = 150;  // K
  double discount = 0.5;        // gamma_h
  double wall_boost = 1.0;      // beta
  double wall_threshold = 1.0;  // m

  void validate() const {
    require(max_steps > 0, ErrorCode::InvalidArgument, "K must be positive");
    require(discount > 0.0 && discount < 1.0, ErrorCode::InvalidArgument, "discount must lie in (0, 1)");
    require(wall_boost > 0.0, ErrorCode::InvalidArgument, "wall boost must be positive");
    require(std::all_of(initial.begin(), initial.end(), [](double v) { return v >= 0.0; }) &&
                std::accumulate(initial.begin(), initial.end(), 0.0) > 0.0,
            ErrorCode::InvalidArgument, "initial policy weights must be nonnegative and not all zero");
  }
};

struct SwitchState {
  std::array<double, 3> probs{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};  // Pi
  Explorer active = Explorer::None;                              // g
  std::size_t steps = 0;                                         // k
};

inline void normalize(std::array<double, 3>& p) {
  const double z = p[0] + p[1] + p[2];
  require(z > 0.0, ErrorCode::InvalidArgument, "policy weights sum to zero");
  for (auto& v : p) v /= z;
}

/// Pi[g] *= gamma_h for the policy that ran K steps without a target.
inline void discount_policy(std::array<double, 3>& p, Explorer g, double discount) {
  if (g != Explorer::None) p[static_cast<std::size_t>(g)] *= discount;
}

/// Wall following is only eligible next to a wall; there it gets
/// beta times the current total weight.
inline void apply_wall_rule(std::array<double, 3>& p, bool near_wall, double boost) {
  if (!near_wall) p[0] = 0.0;
  else p[0] = boost * (p[0] + p[1] + p[2]);
}

inline Explorer sample_policy(const std::array<double, 3>& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    acc += p[i];
    if (u < acc && p[i] > 0.0) return static_cast<Explorer>(i);
  }
  for (std::size_t i = 3; i-- > 0;)
    if (p[i] > 0.0) return static_cast<Explorer>(i);
  return Explorer::Coverage;
}

/// The selection branch: discount after a full K-step stint, apply the wall
/// rule, normalize, sample. Resets k.
inline void reselect(SwitchState& s, const SwitchParams& p, bool near_wall, Rng& rng) {
  if (s.active != Explorer::None && s.steps >= p.max_steps) discount_policy(s.probs, s.active, p.discount);
  apply_wall_rule(s.probs, near_wall, p.wall_boost);
  normalize(s.probs);
  s.active = sample_policy(s.probs, rng);
  s.steps = 0;
}

/// Bundle of the three exploration behaviours with their own state.
struct ExplorerSet {
  WallFollow wall;
  Coverage coverage;
  RandomWalk random;

  void start(Explorer e, const LocalSense& s) {
    switch (e) {
      case Explorer::WallFollow: wall.reset(); break;
      case Explorer::Coverage: coverage.reset(s); break;
      case Explorer::RandomWalk: random.reset(); break;
      case Explorer::None: break;
    }
  }

  ActionDecision act(Explorer e, const LocalSense& s, Rng& rng) {
    switch (e) {
      case Explorer::WallFollow: return wall.act(s);
      case Explorer::Coverage: return coverage.act(s);
      case Explorer::RandomWalk: return random.act(s, rng);
      case Explorer::None: break;
    }
    return ActionDecision::stop();
  }
};

/// Interact with anything in the measurement sector, else pursue anything
/// visible, else explore by switching among wall following, coverage and
/// random walk with adaptive weights.
class AdaptiveSwitch : public Strategy {
 public:
  explicit AdaptiveSwitch(SwitchParams p = {}, GreedyParams g = {}) : p_(p), core_(g) {
    p_.validate();
    state_.probs = p_.initial;
    normalize(state_.probs);
  }

  std::string id() const override { return std::string(to_string(StrategyId::AdaptiveSwitch)); }
  const SwitchState& switch_state() const { return state_; }
  SwitchState& mutable_switch_state() { return state_; }

  nlohmann::json params() const override {
    return {{"initial", p_.initial},         {"K", p_.max_steps},
            {"discount", p_.discount},       {"wall_boost", p_.wall_boost},
            {"wall_threshold", p_.wall_threshold}, {"confidence", core_.params().confidence}};
  }

  Decision decide(const SimView& v, Rng& rng) override {
    if (auto d = core_.interact(v)) return *d;
    if (auto d = core_.pursue(v)) {
      state_.active = Explorer::None;
      state_.steps = 0;
      return *d;
    }
    const auto sense = LocalSense::from(v);
    if (state_.active == Explorer::None || state_.steps >= p_.max_steps) {
      reselect(state_, p_, sense.nearest_wall() < p_.wall_threshold, rng);
      explorers_.start(state_.active, sense);
    }
    ++state_.steps;
    return Decision{explorers_.act(state_.active, sense, rng), {}, std::string(to_string(state_.active))};
  }

 private:
  SwitchParams p_;
  GreedyCore core_;
  SwitchState state_;
  ExplorerSet explorers_;
};

/// Same greedy outer loop, exploring by going mostly straight.
class ForwardExplore : public Strategy {
 public:
  explicit ForwardExplore(ForwardExploreParams p = {}, GreedyParams g = {}) : core_(g), motion_(p), p_(p) {}

  std::string id() const override { return std::string(to_string(StrategyId::ForwardExplore)); }
  const ForwardMotion& motion() const { return motion_; }

  nlohmann::json params() const override {
    return {{"forward_probability", p_.forward_probability},
            {"turn_steps", p_.turn_steps},
            {"confidence", core_.params().confidence}};
  }

  Decision decide(const SimView& v, Rng& rng) override {
    if (auto d = core_.interact(v)) {
      motion_.reset();
      return *d;
    }
    if (auto d = core_.pursue(v)) {
      motion_.reset();
      return *d;
    }
    return Decision{motion_.act(LocalSense::from(v), rng), {}, "forward"};
  }

 private:
  GreedyCore core_;
  ForwardMotion motion_;
  ForwardExploreParams p_;
};

/// One exploration behaviour forever, with the same greedy outer loop.
class Standalone : public Strategy {
 public:
  explicit Standalone(Explorer e, GreedyParams g = {}) : e_(e), core_(g) {
    require(e != Explorer::None, ErrorCode::InvalidArgument, "standalone strategy needs an explorer");
  }

  std::string id() const override { return std::string(to_string(e_)); }
  nlohmann::json params() const override { return {{"confidence", core_.params().confidence}}; }

  Decision decide(const SimView& v, Rng& rng) override {
    if (auto d = core_.interact(v)) return *d;
    if (auto d = core_.pursue(v)) {
      restart_ = true;
      return *d;
    }
    const auto sense = LocalSense::from(v);
    if (restart_) {
      explorers_.start(e_, sense);
      restart_ = false;
    }
    return Decision{explorers_.act(e_, sense, rng), {}, std::string(to_string(e_))};
  }

 private:
  Explorer e_;
  GreedyCore core_;
  ExplorerSet explorers_;
  bool restart_ = true;
};

/// Pursuit step toward the nearest unclassified visible target.
inline Decision policy_pursue(const SimView& v, GreedyCore& core) {
  require(!core.pursuit_candidates(v).empty(), ErrorCode::EmptyObservation, "no visible unclassified target");
  auto d = core.pursue(v);
  require(d.has_value(), ErrorCode::EmptyObservation, "pursuit abandoned");
  return *d;
}

}  // namespace hunt
