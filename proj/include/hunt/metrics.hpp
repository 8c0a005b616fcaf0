#pragma once

// Run metrics as a pure function of a trajectory log.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hunt/bayes.hpp"
#include "hunt/sim.hpp"

namespace hunt {

struct Metrics {
  std::size_t steps = 0;
  double distance = 0.0;   // D
  double info = 0.0;       // B, sum of per-reveal prefix increments
  double info_full = 0.0;  // B with full I(Y;X) credit per sensed target
  std::size_t spent = 0;   // J
  std::size_t classified = 0;  // N_v
  std::size_t correct = 0;
  std::size_t targets = 0;
  double value = 0.0;  // V
  // Ratios, absent when the denominator is zero.
  std::optional<double> path_efficiency;         // 1/D
  std::optional<double> info_efficiency;         // B/D
  std::optional<double> measurement_efficiency;  // B/J
  std::optional<double> visitation_efficiency;   // N_v/D
  /// Cumulative D at each classification, in order.
  std::vector<double> classification_distances;

  /// D at the moment of the n-th classification (1-based); final D if n is 0.
  double distance_at(std::size_t n) const {
    if (n == 0) return distance;
    return classification_distances.at(n - 1);
  }
};

inline Metrics compute_metrics(const TrajectoryLog& log) {
  Metrics m;
  m.steps = log.rows.size();
  m.targets = log.workspace.targets.size();
  std::set<int> sensed;
  for (const auto& r : log.rows) {
    m.distance += r.distance_delta;
    m.info += r.info_delta;
    m.spent = r.spent;
    for (int id : r.interact) sensed.insert(id);
    if (r.test.kind == TestKind::Stop) {
      ++m.classified;
      m.classification_distances.push_back(m.distance);
      for (const auto& t : log.workspace.targets)
        if (t.id == r.test.target && t.true_class == r.test.label) ++m.correct;
    }
  }
  if (!sensed.empty()) {
    const double full = prefix_information(log.net).back();
    m.info_full = full * static_cast<double>(sensed.size());
  }
  m.value = log.config.weights.value(m.info, m.distance, static_cast<double>(m.spent));
  if (m.distance > 0.0) {
    m.path_efficiency = 1.0 / m.distance;
    m.info_efficiency = m.info / m.distance;
    m.visitation_efficiency = static_cast<double>(m.classified) / m.distance;
  }
  if (m.spent > 0) m.measurement_efficiency = m.info / static_cast<double>(m.spent);
  return m;
}

inline nlohmann::json to_json(const Metrics& m) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"steps", m.steps},
          {"D", m.distance},
          {"B", m.info},
          {"B_full", m.info_full},
          {"J", m.spent},
          {"N_v", m.classified},
          {"correct", m.correct},
          {"targets", m.targets},
          {"V", m.value},
          {"eta_P", opt(m.path_efficiency)},
          {"eta_B", opt(m.info_efficiency)},
          {"eta_J", opt(m.measurement_efficiency)},
          {"eta_v", opt(m.visitation_efficiency)}};
}

}  // namespace hunt
