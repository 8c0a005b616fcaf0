#pragma once

// Reads a JSON-lines trajectory log with plain nlohmann::json and recomputes
// the headline metrics from poses and tests, without the library's parser.

#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace oracle {

struct LogTotals {
  std::size_t steps = 0;
  double distance = 0.0;   // from consecutive poses
  std::size_t spent = 0;   // count of continue tests
  std::size_t classified = 0;
  std::size_t correct = 0;
  std::size_t max_j = 0;   // largest J column seen
  std::size_t budget = 0;  // R from the header
  double info = 0.0;       // sum of dB
  std::map<int, std::size_t> reveals;
};

inline LogTotals scan_log(const std::string& jsonl) {
  LogTotals t;
  std::istringstream in(jsonl);
  std::string line;
  double px = 0.0, py = 0.0;
  std::map<int, std::size_t> truth;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto type = j.at("type").get<std::string>();
    if (type == "header") {
      const auto& start = j.at("workspace").at("start");
      px = start[0].get<double>();
      py = start[1].get<double>();
      t.budget = j.at("config").at("budget").get<std::size_t>();
      for (const auto& tg : j.at("workspace").at("targets")) truth[tg.at("id").get<int>()] = tg.at("class").get<std::size_t>();
    } else if (type == "step") {
      ++t.steps;
      const auto& pose = j.at("pose");
      const double x = pose[0].get<double>(), y = pose[1].get<double>();
      t.distance += std::hypot(x - px, y - py);
      px = x;
      py = y;
      const auto& test = j.at("test");
      const auto kind = test.at("kind").get<std::string>();
      if (kind == "continue") {
        ++t.spent;
        ++t.reveals[test.at("target").get<int>()];
      } else if (kind == "stop") {
        ++t.classified;
        if (truth.at(test.at("target").get<int>()) == test.at("label").get<std::size_t>()) ++t.correct;
      }
      t.max_j = std::max(t.max_j, j.at("J").get<std::size_t>());
      t.info += j.at("dB").get<double>();
    }
  }
  return t;
}

}  // namespace oracle
