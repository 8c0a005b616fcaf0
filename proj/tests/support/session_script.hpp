#pragma once

// Scripted protocol client used by the session tests and the acceptance
// run: a seeded bot that reads frames and issues commands, recording the
// exact command stream so it can be replayed blind.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hunt/rng.hpp"
#include "hunt/session.hpp"

namespace support {

struct ScriptedSession {
  std::string id;
  nlohmann::json create;
  std::vector<nlohmann::json> commands;
  std::string jsonl;
  std::size_t errors = 0;  // in-band error replies seen
};

inline nlohmann::json create_message(const std::string& scenario, std::uint64_t seed, std::size_t horizon = 400) {
  return {{"v", 1}, {"kind", "create"}, {"scenario", scenario}, {"seed", seed}, {"pressure", {{"horizon", horizon}}}};
}

/// Plays until the session ends or `steps` commands were sent, then ends it
/// and exports the log.
inline ScriptedSession play(hunt::SessionManager& mgr, const nlohmann::json& create, std::uint64_t bot_seed,
                            std::size_t steps) {
  ScriptedSession out;
  out.create = create;
  auto reply = mgr.handle(create);
  out.id = reply.at("session").get<std::string>();
  hunt::Rng rng(bot_seed);
  for (std::size_t i = 0; i < steps; ++i) {
    if (reply.contains("end_reason") || reply.value("kind", "") == "end") break;
    const auto& frame = reply.at("frame");
    nlohmann::json cmd = {{"type", "wait"}};
    for (const auto& t : frame.at("targets")) {
      if (t.at("classified").get<bool>()) continue;
      if (t.at("measurable").get<bool>() && t.at("revealed").size() < 2 && frame.at("budget_left").get<std::size_t>() > 0) {
        cmd = {{"type", "reveal"}, {"target", t.at("id")}};
        break;
      }
      if (t.at("revealed").size() >= 2 || frame.at("budget_left").get<std::size_t>() == 0) {
        cmd = {{"type", "classify"}, {"target", t.at("id")}, {"label", rng.index(2)}};
        break;
      }
    }
    if (cmd.at("type") == "wait") {
      const double u = rng.uniform();
      if (frame.at("blocked").get<bool>() || u < 0.15) cmd = {{"type", "turn"}, {"w", u < 0.5 ? 1.5 : -1.5}};
      else if (u > 0.97) cmd = {{"type", "wait"}};
      else cmd = {{"type", "move"}, {"v", 1.0}, {"w", rng.uniform(-0.3, 0.3)}};
    }
    out.commands.push_back(cmd);
    reply = mgr.handle({{"v", 1}, {"kind", "command"}, {"session", out.id}, {"command", cmd}});
    if (reply.value("kind", "") == "error") ++out.errors;
  }
  if (!reply.contains("end_reason") && reply.value("kind", "") != "end")
    mgr.handle({{"v", 1}, {"kind", "command"}, {"session", out.id}, {"command", {{"type", "end"}}}});
  out.jsonl = mgr.handle({{"v", 1}, {"kind", "export"}, {"session", out.id}}).at("jsonl").get<std::string>();
  return out;
}

/// Re-sends a recorded command stream to a fresh session without looking at
/// the replies; returns the exported log.
inline std::string replay_blind(hunt::SessionManager& mgr, const ScriptedSession& s) {
  const auto id = mgr.handle(s.create).at("session").get<std::string>();
  for (const auto& cmd : s.commands) mgr.handle({{"v", 1}, {"kind", "command"}, {"session", id}, {"command", cmd}});
  mgr.handle({{"v", 1}, {"kind", "command"}, {"session", id}, {"command", {{"type", "end"}}}});
  return mgr.handle({{"v", 1}, {"kind", "export"}, {"session", id}}).at("jsonl").get<std::string>();
}

}  // namespace support
