#pragma once

// Turn-based play sessions. One command is one engine step; every reply
// carries an egocentric frame that never contains ground truth. Message
// schema (all messages carry "v": 1):
//
//   -> {"kind":"create", "scenario":<name|file>, "seed":<u64>, "pressure":{...}?,
//       "net":<file>?, "target_count":<n>?, "training":<bool>?}
//   <- {"kind":"frame", "session":<id>, "frame":{...}, "schema":{...}}
//   -> {"kind":"command", "session":<id>, "command":{"type":"move","v":..,"w":..}
//                                                  | {"type":"turn","w":..}
//                                                  | {"type":"wait"}
//                                                  | {"type":"reveal","target":<id>}
//                                                  | {"type":"classify","target":<id>,"label":<index|name>}
//                                                  | {"type":"end"}}
//   <- {"kind":"frame"|"reveal_result"|"classify_result"|"end", ...}
//   -> {"kind":"export", "session":<id>}
//   <- {"kind":"log", "session":<id>, "jsonl":"..."}
//   <- {"kind":"error", "code":<ErrorCode>, "message":..., "frame":{...}?}

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hunt/error.hpp"
#include "hunt/scenario.hpp"
#include "hunt/sim.hpp"

namespace hunt {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kFrameRays = 16;
inline constexpr const char* kSessionStrategy = "session";

struct CreateRequest {
  ScenarioSpec scenario;
  std::uint64_t seed = 0;
  bool training = false;
};

inline CreateRequest create_request_from_json(const nlohmann::json& j) {
  CreateRequest r;
  require(j.contains("scenario") && j["scenario"].is_string(), ErrorCode::InvalidArgument, "create needs 'scenario'");
  r.scenario.layout_ref = j["scenario"].get<std::string>();
  r.seed = j.value("seed", std::uint64_t{0});
  r.training = j.value("training", false);
  if (j.contains("net")) r.scenario.net_ref = j["net"].get<std::string>();
  if (j.contains("target_count")) r.scenario.target_count = j["target_count"].get<std::size_t>();
  if (j.contains("pressure")) {
    const auto& p = j["pressure"];
    r.scenario.pressure.horizon = p.value("horizon", r.scenario.pressure.horizon);
    r.scenario.pressure.budget = p.value("budget", r.scenario.pressure.budget);
    if (p.contains("fog_radius") && !p["fog_radius"].is_null())
      r.scenario.pressure.fog_radius = p["fog_radius"].get<double>();
  }
  return r;
}

/// A live or finished session around one engine.
class Session {
 public:
  Session(std::string id, const CreateRequest& req)
      : id_(std::move(id)), training_(req.training), scenario_(sample_scenario(req.scenario, req.seed)),
        engine_(scenario_.workspace, scenario_.net, scenario_.config, req.seed, kSessionStrategy,
                nlohmann::json::object()) {}

  const std::string& id() const { return id_; }
  bool live() const { return !ended_; }
  const Engine& engine() const { return engine_; }
  const std::string& end_reason() const { return end_reason_; }

  /// Static description of the task: feature and class names, limits.
  nlohmann::json schema() const {
    const auto& net = engine_.net();
    nlohmann::json feats = nlohmann::json::array();
    for (const auto& f : net.features()) feats.push_back({{"name", f.name}, {"values", f.values}});
    const auto& c = engine_.config();
    return {{"classes", net.hypothesis().values},
            {"features", std::move(feats)},
            {"horizon", c.pressure.horizon},
            {"budget", c.pressure.budget},
            {"v_max", c.kinematics.v_max},
            {"omega_max", c.kinematics.omega_max},
            {"dt", c.kinematics.dt},
            {"detection_radius", c.passive_fov().radius},
            {"measurement_radius", c.sensors.interact.radius},
            {"training", training_}};
  }

  /// Egocentric frame: bearings and ranges relative to the agent, revealed
  /// values, rays, remaining budget and steps. No absolute pose, no classes.
  nlohmann::json frame() const {
    const auto v = engine_.view();
    nlohmann::json targets = nlohmann::json::array();
    const auto& inter = v.interactable();
    for (int id : v.visible()) {
      const auto t = *v.known(id);
      const Vec2 d = t.position - v.pose().position();
      nlohmann::json jt = {{"id", id},
                           {"bearing", wrap_angle(std::atan2(d.y, d.x) - v.pose().theta)},
                           {"range", norm(d)},
                           {"measurable", std::find(inter.begin(), inter.end(), id) != inter.end()},
                           {"revealed", t.revealed},
                           {"classified", t.classified_as.has_value()}};
      targets.push_back(std::move(jt));
    }
    nlohmann::json rays = nlohmann::json::array();
    for (std::size_t i = 0; i < kFrameRays; ++i) {
      const double rel = wrap_angle(2.0 * std::numbers::pi * static_cast<double>(i) / kFrameRays);
      rays.push_back({{"bearing", rel}, {"range", v.ray(rel)}});
    }
    return {{"k", v.step()},
            {"steps_left", v.horizon() - v.step()},
            {"budget_left", v.budget_left()},
            {"spent", v.spent()},
            {"blocked", v.last_blocked()},
            {"targets", std::move(targets)},
            {"rays", std::move(rays)},
            {"classified", engine_.state().classified},
            {"status", ended_ ? "ended" : "live"}};
  }

  /// Applies one command; engine rejections come back as error messages.
  nlohmann::json apply(const nlohmann::json& cmd) {
    require(!ended_, ErrorCode::SessionEnded, "session " + id_ + " has ended");
    require(cmd.is_object() && cmd.contains("type"), ErrorCode::InvalidArgument, "command needs 'type'");
    const auto type = cmd["type"].get<std::string>();
    if (type == "end") {
      finish("player_end");
      return message("end", {{"end_reason", end_reason_}, {"steps", engine_.state().k}});
    }
    Decision d{ActionDecision::stop(), TestDecision::none(), "human"};
    if (type == "move") {
      d.action = ActionDecision::forward(cmd.value("v", engine_.config().kinematics.v_max), cmd.value("w", 0.0));
    } else if (type == "turn") {
      d.action = ActionDecision::turn(cmd.value("w", engine_.config().kinematics.omega_max));
    } else if (type == "wait") {
    } else if (type == "reveal") {
      d.test = TestDecision::reveal(cmd.at("target").get<int>());
    } else if (type == "classify") {
      d.test = TestDecision::classify(cmd.at("target").get<int>(), parse_label(cmd.at("label")));
    } else {
      fail(ErrorCode::InvalidArgument, "unknown command type '" + type + "'");
    }
    try {
      const auto res = engine_.step(d);
      nlohmann::json extra = nlohmann::json::object();
      std::string kind = "frame";
      if (d.test.kind == TestKind::Continue) {
        kind = "reveal_result";
        const auto l = engine_.state().targets[static_cast<std::size_t>(d.test.target)].revealed - 1;
        const auto& f = engine_.net().features()[l];
        extra = {{"target", d.test.target}, {"feature", f.name}, {"value", *res.z}, {"value_name", f.values[*res.z]}};
      } else if (d.test.kind == TestKind::Stop) {
        kind = "classify_result";
        extra = {{"target", d.test.target}, {"label", d.test.label}};
        if (training_)
          extra["correct"] = engine_.workspace().targets[static_cast<std::size_t>(d.test.target)].true_class == d.test.label;
      }
      if (engine_.finished()) finish("horizon");
      auto out = message(kind, extra);
      if (ended_) out["end_reason"] = end_reason_;
      return out;
    } catch (const HuntError& e) {
      if (e.code() == ErrorCode::HorizonExceeded) finish("horizon");
      return error_message(e);
    }
  }

  nlohmann::json error_message(const HuntError& e) const {
    return {{"v", kProtocolVersion}, {"kind", "error"},  {"session", id_},
            {"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"frame", frame()}};
  }

  /// The finished trajectory; only available after the session ended.
  TrajectoryLog export_log() const {
    require(ended_, ErrorCode::SessionLive, "session " + id_ + " is still live; end it first");
    auto log = engine_.log();
    log.end_reason = end_reason_;
    return log;
  }

  void set_log_dir(std::optional<std::filesystem::path> dir) { log_dir_ = std::move(dir); }
  const std::optional<std::filesystem::path>& log_path() const { return log_path_; }

 private:
  std::size_t parse_label(const nlohmann::json& j) const {
    if (j.is_number_unsigned() || j.is_number_integer()) {
      const auto y = j.get<long long>();
      require(y >= 0, ErrorCode::InvalidArgument, "label must be >= 0");
      return static_cast<std::size_t>(y);
    }
    const auto idx = engine_.net().hypothesis().index_of(j.get<std::string>());
    require(idx.has_value(), ErrorCode::InvalidArgument, "unknown label " + j.dump());
    return *idx;
  }

  nlohmann::json message(const std::string& kind, nlohmann::json extra) const {
    nlohmann::json out = {{"v", kProtocolVersion}, {"kind", kind}, {"session", id_}, {"frame", frame()}};
    for (auto& [k, v] : extra.items()) out[k] = v;
    return out;
  }

  void finish(const std::string& reason) {
    ended_ = true;
    end_reason_ = reason;
    if (!log_dir_) return;
    std::filesystem::create_directories(*log_dir_);
    log_path_ = *log_dir_ / (id_ + ".jsonl");
    std::ofstream f(*log_path_, std::ios::binary);
    f << to_jsonl(export_log());
  }

  std::string id_;
  bool training_ = false;
  Scenario scenario_;
  Engine engine_;
  bool ended_ = false;
  std::string end_reason_;
  std::optional<std::filesystem::path> log_dir_;
  std::optional<std::filesystem::path> log_path_;
};

/// Routes protocol messages to sessions. Safe to call from many threads;
/// commands for one session are serialized by that session's lock.
class SessionManager {
 public:
  explicit SessionManager(std::optional<std::filesystem::path> log_dir = std::nullopt) : log_dir_(std::move(log_dir)) {}

  nlohmann::json handle(const nlohmann::json& msg) {
    std::optional<std::string> sid;
    try {
      require(msg.is_object(), ErrorCode::ParseError, "message must be a JSON object");
      require(msg.value("v", 0) == kProtocolVersion, ErrorCode::SchemaMismatch,
              "unsupported protocol version " + msg.value("v", nlohmann::json(nullptr)).dump());
      const auto kind = msg.value("kind", std::string{});
      if (msg.contains("session") && msg["session"].is_string()) sid = msg["session"].get<std::string>();
      if (kind == "create") return create(create_request_from_json(msg));
      auto& entry = lookup(sid);
      std::lock_guard lk(entry.mu);
      if (kind == "command") {
        require(msg.contains("command"), ErrorCode::InvalidArgument, "command message needs 'command'");
        return entry.session->apply(msg["command"]);
      }
      if (kind == "frame") return {{"v", kProtocolVersion}, {"kind", "frame"}, {"session", *sid}, {"frame", entry.session->frame()}};
      if (kind == "export")
        return {{"v", kProtocolVersion}, {"kind", "log"}, {"session", *sid}, {"jsonl", to_jsonl(entry.session->export_log())}};
      fail(ErrorCode::InvalidArgument, "unknown message kind '" + kind + "'");
    } catch (const HuntError& e) {
      return error(e.code(), e.what(), sid);
    } catch (const nlohmann::json::exception& e) {
      return error(ErrorCode::ParseError, e.what(), sid);
    }
  }

  nlohmann::json handle_text(const std::string& text) {
    nlohmann::json msg;
    try {
      msg = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      return error(ErrorCode::ParseError, e.what(), std::nullopt);
    }
    return handle(msg);
  }

  /// Finished log of a session; SessionLive while it runs.
  TrajectoryLog export_log(const std::string& id) {
    auto& entry = lookup(id);
    std::lock_guard lk(entry.mu);
    return entry.session->export_log();
  }

  std::size_t size() const {
    std::lock_guard lk(mu_);
    return sessions_.size();
  }

 private:
  struct Entry {
    std::mutex mu;
    std::unique_ptr<Session> session;
  };

  static nlohmann::json error(ErrorCode code, const std::string& message, const std::optional<std::string>& sid) {
    nlohmann::json out = {{"v", kProtocolVersion}, {"kind", "error"}, {"code", std::string(to_string(code))}, {"message", message}};
    if (sid) out["session"] = *sid;
    return out;
  }

  nlohmann::json create(const CreateRequest& req) {
    const auto n = counter_.fetch_add(1) + 1;
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(n));
    auto entry = std::make_unique<Entry>();
    entry->session = std::make_unique<Session>(buf, req);
    entry->session->set_log_dir(log_dir_);
    nlohmann::json out = {{"v", kProtocolVersion}, {"kind", "frame"}, {"session", buf},
                          {"frame", entry->session->frame()}, {"schema", entry->session->schema()}};
    std::lock_guard lk(mu_);
    sessions_.emplace(buf, std::move(entry));
    return out;
  }

  Entry& lookup(const std::optional<std::string>& id) {
    require(id.has_value(), ErrorCode::InvalidArgument, "message needs 'session'");
    std::lock_guard lk(mu_);
    auto it = sessions_.find(*id);
    require(it != sessions_.end(), ErrorCode::UnknownSession, "no session '" + *id + "'");
    return *it->second;
  }

  std::optional<std::filesystem::path> log_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  std::atomic<std::uint64_t> counter_{0};
};

// ---------------------------------------------------------------- framing

/// 4-byte big-endian length prefix followed by the UTF-8 JSON payload.
inline std::string encode_frame(const std::string& payload) {
  require(payload.size() <= 0xffffffffu, ErrorCode::InvalidArgument, "message too large");
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((n >> s) & 0xff));
  out += payload;
  return out;
}

/// Incremental decoder for a byte stream of length-prefixed messages.
class FrameDecoder {
 public:
  explicit FrameDecoder(std::size_t max_message = 1u << 24) : max_(max_message) {}

  void feed(const char* data, std::size_t n) { buf_.append(data, n); }

  std::optional<std::string> next() {
    if (buf_.size() < 4) return std::nullopt;
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n = (n << 8) | static_cast<unsigned char>(buf_[static_cast<std::size_t>(i)]);
    require(n <= max_, ErrorCode::ParseError, "message length " + std::to_string(n) + " exceeds limit");
    if (buf_.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
    std::string msg = buf_.substr(4, n);
    buf_.erase(0, 4 + static_cast<std::size_t>(n));
    return msg;
  }

 private:
  std::size_t max_;
  std::string buf_;
};

}  // namespace hunt
