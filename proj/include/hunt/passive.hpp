#pragma once

// Time-adaptive feature-selection heuristics for passive classification.
// Each heuristic ranks the observed features once, then picks how many of
// the top-ranked features to feed to the classifier.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hunt/bayes.hpp"
#include "hunt/error.hpp"

namespace hunt {

struct TimePressureConfig {
  double decision_time_ms = 3000.0;  // t_T
  double feature_time_ms = 250.0;    // t_c
  double lambda_ms = 400.0;

  void validate() const {
    require(decision_time_ms > 0.0 && feature_time_ms > 0.0 && lambda_ms > 0.0,
            ErrorCode::InvalidArgument, "time pressure parameters must be positive");
  }
};

enum class HeuristicId { ProbGain, LogOdds, InfoFree, BayesAll };

constexpr std::string_view to_string(HeuristicId id) {
  switch (id) {
    case HeuristicId::ProbGain: return "probgain";
    case HeuristicId::LogOdds: return "logodds";
    case HeuristicId::InfoFree: return "infofree";
    case HeuristicId::BayesAll: return "bayes_all";
  }
  return "?";
}

inline HeuristicId parse_heuristic(std::string_view s) {
  for (auto id : {HeuristicId::ProbGain, HeuristicId::LogOdds, HeuristicId::InfoFree, HeuristicId::BayesAll})
    if (to_string(id) == s) return id;
  fail(ErrorCode::InvalidArgument, "unknown heuristic '" + std::string(s) + "'");
}

/// Counts the primitive steps of a selection so the O(p log p) work bound
/// can be checked against the 2^p of exhaustive subset search.
struct WorkCounter {
  std::size_t key_evaluations = 0;
  std::size_t comparisons = 0;
  std::size_t scan_steps = 0;

  std::size_t total() const noexcept { return key_evaluations + comparisons + scan_steps; }
};

/// Discount factor exp(-lambda / t_T).
inline double gamma(double decision_time_ms, double lambda_ms) {
  require(decision_time_ms > 0.0 && lambda_ms > 0.0, ErrorCode::InvalidArgument,
          "gamma needs positive t_T and lambda");
  return std::exp(-lambda_ms / decision_time_ms);
}

inline double gamma(const TimePressureConfig& cfg) { return gamma(cfg.decision_time_ms, cfg.lambda_ms); }

struct RankedFeatures {
  std::vector<std::size_t> order;  // feature indices, most informative first
  std::vector<double> keys;        // sort key per rank, nonincreasing
  std::vector<double> values;      // signed v_I per rank (equals keys for ProbGain)

  std::size_t size() const noexcept { return order.size(); }
};

namespace detail {
inline RankedFeatures rank_by_keys(std::vector<double> keys, std::vector<double> values, WorkCounter* work) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t comparisons = 0;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    ++comparisons;
    if (keys[a] != keys[b]) return keys[a] > keys[b];
    return a < b;
  });
  if (work) work->comparisons += comparisons;
  RankedFeatures out;
  out.order = order;
  for (auto i : order) {
    out.keys.push_back(keys[i]);
    out.values.push_back(values[i]);
  }
  return out;
}
}  // namespace detail

inline RankedFeatures rank_by_prob_gain(const BayesNet& net, std::span<const std::size_t> observation,
                                        WorkCounter* work = nullptr) {
  require(observation.size() == net.feature_count(), ErrorCode::ArityMismatch, "observation size");
  std::vector<double> keys(observation.size());
  for (std::size_t l = 0; l < observation.size(); ++l) keys[l] = prob_gain(net, l, observation[l]);
  if (work) work->key_evaluations += keys.size();
  auto values = keys;
  return detail::rank_by_keys(std::move(keys), std::move(values), work);
}

inline RankedFeatures rank_by_abs_log_odds(const BayesNet& net, std::span<const std::size_t> observation,
                                           WorkCounter* work = nullptr) {
  require(observation.size() == net.feature_count(), ErrorCode::ArityMismatch, "observation size");
  std::vector<double> values(observation.size());
  std::vector<double> keys(observation.size());
  for (std::size_t l = 0; l < observation.size(); ++l) {
    values[l] = log_odds(net, l, observation[l]);
    keys[l] = std::abs(values[l]);
  }
  if (work) work->key_evaluations += keys.size();
  return detail::rank_by_keys(std::move(keys), std::move(values), work);
}

/// argmax_i gamma^i * sum_{j<=i} v_j over prefixes; ties go to the shorter prefix.
inline std::size_t h_probgain(const TimePressureConfig& cfg, const RankedFeatures& ranked,
                              WorkCounter* work = nullptr) {
  require(ranked.size() > 0, ErrorCode::InvalidArgument, "no features to select from");
  require(std::all_of(ranked.values.begin(), ranked.values.end(), [](double v) { return v >= 0.0; }),
          ErrorCode::InvalidArgument, "ProbGain needs nonnegative information values");
  const double g = gamma(cfg);
  double discount = 1.0;
  double sum = 0.0;
  double best = -1.0;
  std::size_t best_i = 1;
  for (std::size_t i = 1; i <= ranked.size(); ++i) {
    discount *= g;
    sum += ranked.values[i - 1];
    const double score = discount * sum;
    if (score > best) {
      best = score;
      best_i = i;
    }
    if (work) ++work->scan_steps;
  }
  return best_i;
}

/// argmax_i gamma^i * |v0 + sum_{j<=i} v_j|; ties go to the shorter prefix.
inline std::size_t h_logodds(const TimePressureConfig& cfg, double prior_odds, const RankedFeatures& ranked,
                             WorkCounter* work = nullptr) {
  require(ranked.size() > 0, ErrorCode::InvalidArgument, "no features to select from");
  const double g = gamma(cfg);
  double discount = 1.0;
  double sum = prior_odds;
  double best = -1.0;
  std::size_t best_i = 1;
  for (std::size_t i = 1; i <= ranked.size(); ++i) {
    discount *= g;
    sum += ranked.values[i - 1];
    const double score = discount * std::abs(sum);
    if (score > best) {
      best = score;
      best_i = i;
    }
    if (work) ++work->scan_steps;
  }
  return best_i;
}

/// ceil(p * exp(-lambda / t_T)); never compares information values.
inline std::size_t h_infofree(const TimePressureConfig& cfg, std::size_t feature_count) {
  require(feature_count > 0, ErrorCode::InvalidArgument, "InfoFree needs at least one feature");
  const auto raw = std::ceil(static_cast<double>(feature_count) * gamma(cfg));
  return std::clamp(static_cast<std::size_t>(raw), std::size_t{1}, feature_count);
}

struct PressuredDecision {
  std::size_t predicted_class = 0;
  std::size_t used_features = 0;
  std::vector<std::size_t> selected;  // feature indices fed to the classifier
};

/// Rank, select a prefix with the heuristic, then take the MAP class using
/// only the selected features.
inline PressuredDecision classify_under_pressure(const BayesNet& net, std::span<const std::size_t> observation,
                                                 const TimePressureConfig& cfg, HeuristicId heuristic,
                                                 WorkCounter* work = nullptr) {
  cfg.validate();
  const auto p = net.feature_count();
  require(observation.size() == p, ErrorCode::ArityMismatch, "observation size");
  PressuredDecision out;
  switch (heuristic) {
    case HeuristicId::ProbGain: {
      auto ranked = rank_by_prob_gain(net, observation, work);
      // A value that lowers the top posterior gains nothing; count it as 0
      // so the prefix sum stays a sum of gains (non-uniform priors only).
      for (auto& v : ranked.values) v = std::max(v, 0.0);
      out.used_features = h_probgain(cfg, ranked, work);
      out.selected.assign(ranked.order.begin(), ranked.order.begin() + static_cast<std::ptrdiff_t>(out.used_features));
      break;
    }
    case HeuristicId::LogOdds: {
      auto ranked = rank_by_abs_log_odds(net, observation, work);
      out.used_features = h_logodds(cfg, prior_log_odds(net), ranked, work);
      out.selected.assign(ranked.order.begin(), ranked.order.begin() + static_cast<std::ptrdiff_t>(out.used_features));
      break;
    }
    case HeuristicId::InfoFree: {
      auto ranked = rank_by_prob_gain(net, observation, work);
      out.used_features = h_infofree(cfg, p);
      out.selected.assign(ranked.order.begin(), ranked.order.begin() + static_cast<std::ptrdiff_t>(out.used_features));
      break;
    }
    case HeuristicId::BayesAll:
      out.used_features = p;
      out.selected.resize(p);
      std::iota(out.selected.begin(), out.selected.end(), std::size_t{0});
      break;
  }
  out.predicted_class = map_class(net, Evidence::from_subset(observation, out.selected));
  return out;
}

}  // namespace hunt
