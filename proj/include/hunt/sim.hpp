#pragma once

// Discrete-time treasure-hunt simulator: unicycle motion with collision
// rejection, two sensor sectors, sequential feature reveals under a budget,
// classification records, JSON-lines trajectory logs and replay.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hunt/bayes.hpp"
#include "hunt/bayes_io.hpp"
#include "hunt/error.hpp"
#include "hunt/geometry.hpp"
#include "hunt/rng.hpp"
#include "hunt/workspace.hpp"

namespace hunt {

inline constexpr int kLogVersion = 1;

struct KinematicLimits {
  double dt = 0.1;                              // s
  double v_max = 1.0;                           // m/s
  double omega_max = std::numbers::pi / 2.0;    // rad/s

  double max_step() const { return v_max * dt; }
  double max_turn() const { return omega_max * dt; }
};

struct SensorConfig {
  SectorFov passive{4.0 * std::numbers::pi / 3.0, 5.0, 0.0};  // detection and localization
  SectorFov interact{std::numbers::pi / 2.0, 1.5, 0.0};       // feature measurement
  double footprint = kDefaultFootprint;
  double ray_range = 3.0;
};

struct PressureConfig {
  std::size_t horizon = 3000;  // T, steps
  std::size_t budget = 40;     // R, features
  std::optional<double> fog_radius;
  std::optional<double> aspiration_bits;  // Delta

  void validate() const {
    require(horizon > 0, ErrorCode::InvalidArgument, "horizon must be positive");
    require(!fog_radius || *fog_radius > 0.0, ErrorCode::InvalidArgument, "fog radius must be positive");
  }
};

struct ObjectiveWeights {
  double info = 1.0;      // omega_B
  double distance = 0.1;  // omega_D
  double cost = 0.2;      // omega_J

  void validate() const {
    require(info >= 0.0 && distance >= 0.0 && cost >= 0.0, ErrorCode::InvalidArgument, "weights must be >= 0");
    require(info + distance + cost > 0.0, ErrorCode::InvalidArgument, "weights must not all be zero");
  }
  double value(double b, double d, double j) const { return info * b - distance * d - cost * j; }
};

struct SimConfig {
  KinematicLimits kinematics;
  SensorConfig sensors;
  PressureConfig pressure;
  ObjectiveWeights weights;

  /// Detection sector after the fog override.
  SectorFov passive_fov() const {
    return pressure.fog_radius ? sensors.passive.with_radius(*pressure.fog_radius) : sensors.passive;
  }
  double ray_range() const {
    return pressure.fog_radius ? std::min(sensors.ray_range, *pressure.fog_radius) : sensors.ray_range;
  }
  void validate() const {
    pressure.validate();
    weights.validate();
    sensors.passive.validate();
    sensors.interact.validate();
    require(kinematics.dt > 0 && kinematics.v_max > 0 && kinematics.omega_max > 0, ErrorCode::InvalidArgument,
            "kinematic limits must be positive");
  }
};

inline nlohmann::json to_json(const SectorFov& f) {
  return {{"angle_of_view", f.angle_of_view}, {"radius", f.radius}, {"bisector_offset", f.bisector_offset}};
}
inline SectorFov sector_from_json(const nlohmann::json& j) {
  return {j.at("angle_of_view").get<double>(), j.at("radius").get<double>(), j.value("bisector_offset", 0.0)};
}

inline nlohmann::json to_json(const SimConfig& c) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"dt", c.kinematics.dt},
          {"v_max", c.kinematics.v_max},
          {"omega_max", c.kinematics.omega_max},
          {"passive_fov", to_json(c.sensors.passive)},
          {"interact_fov", to_json(c.sensors.interact)},
          {"footprint", c.sensors.footprint},
          {"ray_range", c.sensors.ray_range},
          {"horizon", c.pressure.horizon},
          {"budget", c.pressure.budget},
          {"fog_radius", opt(c.pressure.fog_radius)},
          {"aspiration_bits", opt(c.pressure.aspiration_bits)},
          {"weights", {{"info", c.weights.info}, {"distance", c.weights.distance}, {"cost", c.weights.cost}}}};
}

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
  auto opt = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
  };
  SimConfig c;
  c.kinematics = {j.at("dt").get<double>(), j.at("v_max").get<double>(), j.at("omega_max").get<double>()};
  c.sensors.passive = sector_from_json(j.at("passive_fov"));
  c.sensors.interact = sector_from_json(j.at("interact_fov"));
  c.sensors.footprint = j.at("footprint").get<double>();
  c.sensors.ray_range = j.at("ray_range").get<double>();
  c.pressure.horizon = j.at("horizon").get<std::size_t>();
  c.pressure.budget = j.at("budget").get<std::size_t>();
  c.pressure.fog_radius = opt("fog_radius");
  c.pressure.aspiration_bits = opt("aspiration_bits");
  const auto& w = j.at("weights");
  c.weights = {w.at("info").get<double>(), w.at("distance").get<double>(), w.at("cost").get<double>()};
  return c;
}

// ---------------------------------------------------------------- decisions

enum class ActionKind { Stop, Forward, TurnLeft, TurnRight };

constexpr std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Stop: return "stop";
    case ActionKind::Forward: return "forward";
    case ActionKind::TurnLeft: return "turn_left";
    case ActionKind::TurnRight: return "turn_right";
  }
  return "?";
}

inline ActionKind parse_action_kind(std::string_view s) {
  for (auto k : {ActionKind::Stop, ActionKind::Forward, ActionKind::TurnLeft, ActionKind::TurnRight})
    if (to_string(k) == s) return k;
  fail(ErrorCode::SchemaMismatch, "unknown action kind '" + std::string(s) + "'");
}

/// Control for one step. Forward may steer; turns rotate in place.
struct ActionDecision {
  ActionKind kind = ActionKind::Stop;
  double linear = 0.0;   // m/s
  double angular = 0.0;  // rad/s, positive is counter-clockwise

  static ActionDecision stop() { return {}; }
  static ActionDecision forward(double v, double w = 0.0) { return {ActionKind::Forward, v, w}; }
  static ActionDecision turn_left(double w) { return {ActionKind::TurnLeft, 0.0, std::abs(w)}; }
  static ActionDecision turn_right(double w) { return {ActionKind::TurnRight, 0.0, -std::abs(w)}; }
  /// In-place turn by the signed rate.
  static ActionDecision turn(double w) { return w >= 0.0 ? turn_left(w) : turn_right(w); }

  ActionDecision clipped(const KinematicLimits& lim) const {
    ActionDecision a = *this;
    switch (kind) {
      case ActionKind::Stop: a.linear = a.angular = 0.0; break;
      case ActionKind::Forward:
        a.linear = std::clamp(linear, 0.0, lim.v_max);
        a.angular = std::clamp(angular, -lim.omega_max, lim.omega_max);
        break;
      case ActionKind::TurnLeft:
        a.linear = 0.0;
        a.angular = std::clamp(std::abs(angular), 0.0, lim.omega_max);
        break;
      case ActionKind::TurnRight:
        a.linear = 0.0;
        a.angular = -std::clamp(std::abs(angular), 0.0, lim.omega_max);
        break;
    }
    return a;
  }
};

enum class TestKind { None, Continue, Stop };

constexpr std::string_view to_string(TestKind k) {
  switch (k) {
    case TestKind::None: return "none";
    case TestKind::Continue: return "continue";
    case TestKind::Stop: return "stop";
  }
  return "?";
}

/// Continue reveals the next feature of `target`; Stop ends testing of
/// `target` and records `label` as its classification.
struct TestDecision {
  TestKind kind = TestKind::None;
  int target = -1;
  std::size_t label = 0;

  static TestDecision none() { return {}; }
  static TestDecision reveal(int id) { return {TestKind::Continue, id, 0}; }
  static TestDecision classify(int id, std::size_t y) { return {TestKind::Stop, id, y}; }
};

struct Decision {
  ActionDecision action;
  TestDecision test;
  std::string policy;  // informational tag written to the log
};

// ---------------------------------------------------------------- state

struct TargetRecord {
  std::size_t revealed = 0;  // p_i
  std::optional<std::size_t> classified_as;
  bool detected = false;  // ever in the detection sector
  bool sensed = false;    // ever in the measurement sector with line of sight
};

struct SimState {
  Pose agent;
  std::size_t k = 0;
  std::size_t spent = 0;  // J
  double distance = 0.0;  // D
  double info = 0.0;      // B, prefix accounting
  std::size_t classified = 0;
  std::vector<TargetRecord> targets;
  std::vector<int> visible;   // o(t_k)
  std::vector<int> interact;  // detected targets in the measurement sector now
  bool last_blocked = false;
};

struct LogRow {
  std::size_t k = 0;
  Pose pose;  // after the step
  ActionDecision action;
  bool blocked = false;
  TestDecision test;
  std::optional<std::size_t> z;
  std::vector<int> visible;
  std::vector<int> interact;
  std::size_t spent = 0;
  double info_delta = 0.0;
  double distance_delta = 0.0;
  std::string policy;
  std::string hash;
};

struct TrajectoryLog {
  WorkspaceSpec workspace;
  BayesNet net;
  SimConfig config;
  std::uint64_t seed = 0;
  std::string strategy;
  nlohmann::json strategy_params = nlohmann::json::object();
  std::vector<LogRow> rows;
  std::string end_reason;
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline nlohmann::json to_json(const ActionDecision& a) {
  return {{"kind", std::string(to_string(a.kind))}, {"v", a.linear}, {"w", a.angular}};
}

inline nlohmann::json to_json(const TestDecision& t) {
  nlohmann::json j = {{"kind", std::string(to_string(t.kind))}};
  if (t.kind != TestKind::None) j["target"] = t.target;
  if (t.kind == TestKind::Stop) j["label"] = t.label;
  return j;
}

inline nlohmann::json to_json(const LogRow& r) {
  return {{"type", "step"},
          {"k", r.k},
          {"pose", to_json(r.pose)},
          {"action", to_json(r.action)},
          {"blocked", r.blocked},
          {"test", to_json(r.test)},
          {"z", r.z ? nlohmann::json(*r.z) : nlohmann::json(nullptr)},
          {"visible", r.visible},
          {"interact", r.interact},
          {"J", r.spent},
          {"dB", r.info_delta},
          {"dD", r.distance_delta},
          {"policy", r.policy},
          {"h", r.hash}};
}

inline nlohmann::json log_header_json(const TrajectoryLog& log) {
  return {{"type", "header"},
          {"v", kLogVersion},
          {"workspace", to_json(log.workspace)},
          {"net", to_json(log.net)},
          {"config", to_json(log.config)},
          {"seed", log.seed},
          {"strategy", log.strategy},
          {"strategy_params", log.strategy_params}};
}

/// Header line, one line per step, and an end line.
inline std::string to_jsonl(const TrajectoryLog& log) {
  std::string out = log_header_json(log).dump();
  out += '\n';
  for (const auto& r : log.rows) {
    out += to_json(r).dump();
    out += '\n';
  }
  out += nlohmann::json{{"type", "end"}, {"reason", log.end_reason}, {"steps", log.rows.size()}}.dump();
  out += '\n';
  return out;
}

inline LogRow log_row_from_json(const nlohmann::json& j) {
  LogRow r;
  r.k = j.at("k").get<std::size_t>();
  r.pose = pose_from_json(j.at("pose"));
  const auto& a = j.at("action");
  r.action = {parse_action_kind(a.at("kind").get<std::string>()), a.at("v").get<double>(), a.at("w").get<double>()};
  r.blocked = j.at("blocked").get<bool>();
  const auto& t = j.at("test");
  const auto tk = t.at("kind").get<std::string>();
  if (tk == "none") r.test = TestDecision::none();
  else if (tk == "continue") r.test = TestDecision::reveal(t.at("target").get<int>());
  else if (tk == "stop") r.test = TestDecision::classify(t.at("target").get<int>(), t.at("label").get<std::size_t>());
  else fail(ErrorCode::SchemaMismatch, "unknown test kind '" + tk + "'");
  if (!j.at("z").is_null()) r.z = j.at("z").get<std::size_t>();
  r.visible = j.at("visible").get<std::vector<int>>();
  r.interact = j.at("interact").get<std::vector<int>>();
  r.spent = j.at("J").get<std::size_t>();
  r.info_delta = j.at("dB").get<double>();
  r.distance_delta = j.at("dD").get<double>();
  r.policy = j.value("policy", std::string{});
  r.hash = j.at("h").get<std::string>();
  return r;
}

/// Parses a JSON-lines log; SchemaMismatch on anything unexpected.
inline TrajectoryLog parse_jsonl(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        require(!header, ErrorCode::SchemaMismatch, "duplicate header");
        require(j.at("v").get<int>() == kLogVersion, ErrorCode::SchemaMismatch, "unsupported log version");
        log.workspace = workspace_from_json(j.at("workspace"));
        log.net = bayes_net_from_json(j.at("net"));
        log.config = sim_config_from_json(j.at("config"));
        log.seed = j.at("seed").get<std::uint64_t>();
        log.strategy = j.at("strategy").get<std::string>();
        log.strategy_params = j.value("strategy_params", nlohmann::json::object());
        header = true;
      } else if (type == "step") {
        require(header, ErrorCode::SchemaMismatch, "step before header");
        auto row = log_row_from_json(j);
        require(log.rows.empty() || row.k > log.rows.back().k, ErrorCode::SchemaMismatch,
                "rows must be strictly increasing in k");
        log.rows.push_back(std::move(row));
      } else if (type == "end") {
        log.end_reason = j.at("reason").get<std::string>();
      } else {
        fail(ErrorCode::SchemaMismatch, "unknown line type '" + type + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SchemaMismatch, "line " + std::to_string(line_no) + ": " + e.what());
  } catch (const HuntError& e) {
    if (e.code() == ErrorCode::SchemaMismatch) throw;
    fail(ErrorCode::SchemaMismatch, "line " + std::to_string(line_no) + ": " + e.what());
  }
  require(header, ErrorCode::SchemaMismatch, "missing header line");
  return log;
}

inline TrajectoryLog parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_jsonl(in);
}

// ---------------------------------------------------------------- engine

struct StepResult {
  bool blocked = false;
  std::optional<std::size_t> z;
  std::vector<int> visible;
  double info_delta = 0.0;
  double distance_delta = 0.0;
};

/// What a target looks like to the agent after detection.
struct KnownTarget {
  int id = 0;
  Vec2 position;
  std::vector<std::size_t> revealed;  // feature values in reveal order
  std::optional<std::size_t> classified_as;
};

class Engine;

/// Read-only agent-side view: own pose, the map, detected targets and what
/// has been revealed about them. Never exposes classes or undetected targets.
class SimView {
 public:
  explicit SimView(const Engine& e) : e_(&e) {}

  Pose pose() const;
  std::size_t step() const;
  std::size_t horizon() const;
  std::size_t budget() const;
  std::size_t spent() const;
  std::size_t budget_left() const { return budget() - spent(); }
  bool last_blocked() const;
  const std::vector<int>& visible() const;
  const std::vector<int>& interactable() const;
  std::optional<KnownTarget> known(int id) const;
  std::vector<KnownTarget> known_targets() const;
  Evidence evidence(int id) const;
  /// Range to the nearest wall along pose heading + relative_heading.
  double ray(double relative_heading) const;
  double ray_range() const;
  const BayesNet& net() const;
  const SimConfig& config() const;
  /// Bounds and obstacles only.
  const WorkspaceSpec& map() const;

 private:
  const Engine* e_;
};

class Engine {
 public:
  Engine(WorkspaceSpec ws, BayesNet net, SimConfig cfg, std::uint64_t seed, std::string strategy = {},
         nlohmann::json strategy_params = nlohmann::json::object())
      : ws_(std::move(ws)), net_(std::move(net)), cfg_(cfg) {
    cfg_.validate();
    validate_workspace(ws_, cfg_.sensors.footprint);
    for (std::size_t i = 0; i < ws_.targets.size(); ++i) {
      const auto& t = ws_.targets[i];
      require(t.id == static_cast<int>(i), ErrorCode::InvalidArgument, "target ids must be 0..r-1 in order");
      require(t.features.size() == net_.feature_count(), ErrorCode::ArityMismatch,
              "target " + std::to_string(t.id) + " feature count != net feature count");
      require(t.true_class < net_.classes(), ErrorCode::InvalidArgument, "target class out of range");
      for (std::size_t l = 0; l < t.features.size(); ++l)
        require(t.features[l] < net_.features()[l].arity(), ErrorCode::InvalidArgument, "target feature out of range");
    }
    map_ = ws_;
    map_.targets.clear();
    prefix_info_ = prefix_information(net_);
    state_.agent = ws_.start;
    state_.agent.theta = wrap_angle(state_.agent.theta);
    state_.targets.resize(ws_.targets.size());
    observe();
    log_.workspace = ws_;
    log_.net = net_;
    log_.config = cfg_;
    log_.seed = seed;
    log_.strategy = std::move(strategy);
    log_.strategy_params = std::move(strategy_params);
  }

  const SimState& state() const noexcept { return state_; }
  const TrajectoryLog& log() const noexcept { return log_; }
  TrajectoryLog& mutable_log() noexcept { return log_; }
  const WorkspaceSpec& workspace() const noexcept { return ws_; }
  const WorkspaceSpec& map() const noexcept { return map_; }
  const BayesNet& net() const noexcept { return net_; }
  const SimConfig& config() const noexcept { return cfg_; }
  SimView view() const { return SimView(*this); }
  bool finished() const noexcept { return state_.k >= cfg_.pressure.horizon; }
  bool all_classified() const noexcept { return state_.classified == ws_.targets.size(); }
  double prefix_info(std::size_t m) const { return prefix_info_.at(m); }

  /// Applies the test at the current pose, then the motion.
  StepResult step(const Decision& d) {
    require(state_.k < cfg_.pressure.horizon, ErrorCode::HorizonExceeded, "horizon reached");
    check_test(d.test);
    StepResult out;
    const auto action = d.action.clipped(cfg_.kinematics);
    auto& st = state_;

    if (d.test.kind == TestKind::Continue) {
      auto& rec = st.targets[static_cast<std::size_t>(d.test.target)];
      const auto l = rec.revealed;
      out.z = ws_.targets[static_cast<std::size_t>(d.test.target)].features[l];
      rec.revealed = l + 1;
      ++st.spent;
      out.info_delta = prefix_info_[l + 1] - prefix_info_[l];
      st.info += out.info_delta;
    } else if (d.test.kind == TestKind::Stop) {
      st.targets[static_cast<std::size_t>(d.test.target)].classified_as = d.test.label;
      ++st.classified;
    }

    const auto& lim = cfg_.kinematics;
    Pose next = st.agent;
    next.x += action.linear * std::cos(st.agent.theta) * lim.dt;
    next.y += action.linear * std::sin(st.agent.theta) * lim.dt;
    next.theta = wrap_angle(st.agent.theta + action.angular * lim.dt);
    if (action.linear > 0.0 && !segment_free(st.agent.position(), next.position(), cfg_.sensors.footprint, ws_)) {
      out.blocked = true;
    } else {
      out.distance_delta = distance(st.agent.position(), next.position());
      st.agent = next;
      st.distance += out.distance_delta;
    }
    st.last_blocked = out.blocked;
    ++st.k;
    observe();
    out.visible = st.visible;

    LogRow row;
    row.k = st.k - 1;
    row.pose = st.agent;
    row.action = action;
    row.blocked = out.blocked;
    row.test = d.test;
    row.z = out.z;
    row.visible = st.visible;
    row.interact = st.interact;
    row.spent = st.spent;
    row.info_delta = out.info_delta;
    row.distance_delta = out.distance_delta;
    row.policy = d.policy;
    row.hash = hex64(state_hash());
    log_.rows.push_back(std::move(row));
    return out;
  }

  /// FNV-1a over pose bits, clock, spend and per-target records.
  std::uint64_t state_hash() const {
    std::uint64_t h = fnv1a("");
    auto mix = [&h](const void* p, std::size_t n) {
      h = fnv1a(std::string_view(static_cast<const char*>(p), n), h);
    };
    auto mix_u = [&](std::uint64_t v) { mix(&v, sizeof v); };
    auto mix_d = [&](double v) { mix(&v, sizeof v); };
    mix_d(state_.agent.x);
    mix_d(state_.agent.y);
    mix_d(state_.agent.theta);
    mix_u(state_.k);
    mix_u(state_.spent);
    for (const auto& t : state_.targets) {
      mix_u(t.revealed);
      mix_u(t.classified_as ? *t.classified_as : ~std::uint64_t{0});
      mix_u(t.detected ? 1 : 0);
    }
    return h;
  }

 private:
  friend class SimView;

  void check_test(const TestDecision& t) const {
    if (t.kind == TestKind::None) return;
    require(t.target >= 0 && static_cast<std::size_t>(t.target) < ws_.targets.size(), ErrorCode::InvalidArgument,
            "unknown target " + std::to_string(t.target));
    const auto& rec = state_.targets[static_cast<std::size_t>(t.target)];
    require(rec.detected, ErrorCode::TargetNotSensible, "target " + std::to_string(t.target) + " not detected");
    require(!rec.classified_as, ErrorCode::AlreadyClassified,
            "target " + std::to_string(t.target) + " already classified");
    if (t.kind == TestKind::Stop) {
      require(t.label < net_.classes(), ErrorCode::InvalidArgument, "label out of range");
      return;
    }
    require(std::find(state_.interact.begin(), state_.interact.end(), t.target) != state_.interact.end(),
            ErrorCode::TargetNotSensible, "target " + std::to_string(t.target) + " not in the measurement sector");
    require(rec.revealed < net_.feature_count(), ErrorCode::InvalidArgument, "all features already revealed");
    require(state_.spent < cfg_.pressure.budget, ErrorCode::BudgetExhausted, "feature budget exhausted");
  }

  void observe() {
    auto& st = state_;
    st.visible = visible_targets(st.agent, cfg_.passive_fov(), ws_);
    for (int id : st.visible) st.targets[static_cast<std::size_t>(id)].detected = true;
    st.interact.clear();
    for (const auto& t : ws_.targets) {
      auto& rec = st.targets[static_cast<std::size_t>(t.id)];
      if (rec.detected && target_visible(st.agent, cfg_.sensors.interact, ws_, t.position)) {
        st.interact.push_back(t.id);
        rec.sensed = true;
      }
    }
  }

  WorkspaceSpec ws_;
  WorkspaceSpec map_;
  BayesNet net_;
  SimConfig cfg_;
  std::vector<double> prefix_info_;
  SimState state_;
  TrajectoryLog log_;
};

inline Pose SimView::pose() const { return e_->state_.agent; }
inline std::size_t SimView::step() const { return e_->state_.k; }
inline std::size_t SimView::horizon() const { return e_->cfg_.pressure.horizon; }
inline std::size_t SimView::budget() const { return e_->cfg_.pressure.budget; }
inline std::size_t SimView::spent() const { return e_->state_.spent; }
inline bool SimView::last_blocked() const { return e_->state_.last_blocked; }
inline const std::vector<int>& SimView::visible() const { return e_->state_.visible; }
inline const std::vector<int>& SimView::interactable() const { return e_->state_.interact; }
inline const BayesNet& SimView::net() const { return e_->net_; }
inline const SimConfig& SimView::config() const { return e_->cfg_; }
inline const WorkspaceSpec& SimView::map() const { return e_->map_; }
inline double SimView::ray_range() const { return e_->cfg_.ray_range(); }

inline std::optional<KnownTarget> SimView::known(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= e_->ws_.targets.size()) return std::nullopt;
  const auto& rec = e_->state_.targets[static_cast<std::size_t>(id)];
  if (!rec.detected) return std::nullopt;
  const auto& t = e_->ws_.targets[static_cast<std::size_t>(id)];
  KnownTarget k;
  k.id = id;
  k.position = t.position;
  k.revealed.assign(t.features.begin(), t.features.begin() + static_cast<std::ptrdiff_t>(rec.revealed));
  k.classified_as = rec.classified_as;
  return k;
}

inline std::vector<KnownTarget> SimView::known_targets() const {
  std::vector<KnownTarget> out;
  for (std::size_t i = 0; i < e_->ws_.targets.size(); ++i)
    if (auto k = known(static_cast<int>(i))) out.push_back(std::move(*k));
  return out;
}

inline Evidence SimView::evidence(int id) const {
  Evidence ev(e_->net_.feature_count());
  if (auto k = known(id))
    for (std::size_t l = 0; l < k->revealed.size(); ++l) ev.observe(l, k->revealed[l]);
  return ev;
}

inline double SimView::ray(double relative_heading) const {
  const auto p = pose();
  return ray_cast(p, p.theta + relative_heading, ray_range(), e_->map_);
}

// ---------------------------------------------------------------- run loop

/// Per-step policy: maps what the agent has seen so far to a decision.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string id() const = 0;
  virtual Decision decide(const SimView& view, Rng& rng) = 0;
  virtual bool done(const SimView&) const { return false; }
  /// Stops the run once the aspiration level is met.
  virtual bool satisficing() const { return false; }
  virtual nlohmann::json params() const { return nlohmann::json::object(); }
};

/// Runs until the horizon, the strategy finishes, every target is
/// classified, or a satisficing strategy reaches the aspiration level.
inline TrajectoryLog run(const WorkspaceSpec& ws, const BayesNet& net, const SimConfig& cfg, Strategy& strategy,
                         std::uint64_t seed) {
  Engine engine(ws, net, cfg, seed, strategy.id(), strategy.params());
  Rng rng(derive_seed(seed, "strategy"));
  std::string reason = "horizon";
  while (!engine.finished()) {
    const auto view = engine.view();
    if (engine.all_classified()) {
      reason = "all_classified";
      break;
    }
    if (strategy.done(view)) {
      reason = "strategy_done";
      break;
    }
    if (strategy.satisficing() && cfg.pressure.aspiration_bits &&
        engine.state().info >= *cfg.pressure.aspiration_bits) {
      reason = "aspiration";
      break;
    }
    engine.step(strategy.decide(view, rng));
  }
  auto log = engine.log();
  log.end_reason = reason;
  return log;
}

struct ReplayReport {
  std::size_t rows = 0;
  std::size_t mismatches = 0;
  std::optional<std::size_t> first_mismatch;  // k of the first differing row
  bool identical = false;                      // re-serialized log equals the input byte for byte
};

/// Re-drives the engine with the logged decisions and compares every row.
inline ReplayReport replay(const TrajectoryLog& log) {
  Engine engine(log.workspace, log.net, log.config, log.seed, log.strategy, log.strategy_params);
  ReplayReport rep;
  for (const auto& row : log.rows) {
    engine.step(Decision{row.action, row.test, row.policy});
    const auto& got = engine.log().rows.back();
    ++rep.rows;
    if (to_json(got).dump() != to_json(row).dump()) {
      ++rep.mismatches;
      if (!rep.first_mismatch) rep.first_mismatch = row.k;
    }
  }
  auto out = engine.log();
  out.end_reason = log.end_reason;
  rep.identical = rep.mismatches == 0 && to_jsonl(out) == to_jsonl(log);
  return rep;
}

}  // namespace hunt
