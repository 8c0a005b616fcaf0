#pragma once

// Benchmark matrix: strategies x scenarios x seeds, one metrics row per
// cell, written as CSV and JSON. Cells run in parallel; rows are merged in
// cell-key order so reports do not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hunt/error.hpp"
#include "hunt/metrics.hpp"
#include "hunt/planner.hpp"
#include "hunt/scenario.hpp"
#include "hunt/sim.hpp"
#include "hunt/strategies.hpp"

namespace hunt {

struct StrategyOptions {
  SwitchParams adaptive;
  ForwardExploreParams forward;
  GreedyParams greedy;
  PlannerParams planner;
};

/// Seeds the planner's roadmap from the run seed so cells stay independent.
inline std::unique_ptr<Strategy> make_strategy(StrategyId id, const StrategyOptions& o = {},
                                               std::optional<std::uint64_t> run_seed = std::nullopt) {
  switch (id) {
    case StrategyId::AdaptiveSwitch: return std::make_unique<AdaptiveSwitch>(o.adaptive, o.greedy);
    case StrategyId::ForwardExplore: return std::make_unique<ForwardExplore>(o.forward, o.greedy);
    case StrategyId::WallFollow: return std::make_unique<Standalone>(Explorer::WallFollow, o.greedy);
    case StrategyId::Coverage: return std::make_unique<Standalone>(Explorer::Coverage, o.greedy);
    case StrategyId::RandomWalk: return std::make_unique<Standalone>(Explorer::RandomWalk, o.greedy);
    case StrategyId::PlannerPrm:
    case StrategyId::PlannerCellDecomp: {
      auto p = o.planner;
      p.method = id == StrategyId::PlannerPrm ? RoadmapMethod::Prm : RoadmapMethod::CellDecomp;
      if (run_seed) p.prm.seed = derive_seed(*run_seed, "roadmap");
      return std::make_unique<RecedingPlanner>(p);
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown strategy");
}

struct BenchConfig {
  std::vector<StrategyId> strategies;
  std::vector<ScenarioSpec> scenarios;
  std::size_t seeds = 10;
  std::uint64_t master_seed = 0;
  StrategyOptions options;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool keep_logs = false;
};

struct BenchRow {
  std::string scenario;
  std::string strategy;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::string end_reason;
  Metrics metrics;
  std::optional<TrajectoryLog> log;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

/// Stable per-cell seed: independent of which strategies are in the matrix,
/// so every strategy sees the same target draw for a given seed index.
inline std::uint64_t cell_seed(std::uint64_t master, const std::string& scenario, std::size_t index) {
  return derive_seed(master, scenario + "#" + std::to_string(index));
}

inline BenchRow run_cell(const ScenarioSpec& spec, StrategyId sid, std::size_t index, std::uint64_t master,
                         const StrategyOptions& opt, bool keep_log) {
  BenchRow row;
  row.scenario = spec.layout_ref;
  row.strategy = std::string(to_string(sid));
  row.seed_index = index;
  row.seed = cell_seed(master, spec.layout_ref, index);
  try {
    const auto sc = sample_scenario(spec, row.seed);
    auto strategy = make_strategy(sid, opt, row.seed);
    auto log = run(sc.workspace, sc.net, sc.config, *strategy, row.seed);
    row.metrics = compute_metrics(log);
    row.end_reason = log.end_reason;
    row.ok = true;
    if (keep_log) row.log = std::move(log);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

inline BenchReport run_matrix(const BenchConfig& cfg) {
  require(!cfg.strategies.empty() && !cfg.scenarios.empty() && cfg.seeds > 0, ErrorCode::InvalidArgument,
          "matrix needs at least one strategy, scenario and seed");
  struct Cell {
    std::size_t scenario, strategy, seed;
  };
  std::vector<Cell> cells;
  for (std::size_t a = 0; a < cfg.scenarios.size(); ++a)
    for (std::size_t b = 0; b < cfg.strategies.size(); ++b)
      for (std::size_t c = 0; c < cfg.seeds; ++c) cells.push_back({a, b, c});
  BenchReport rep;
  rep.rows.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto& c = cells[i];
      rep.rows[i] = run_cell(cfg.scenarios[c.scenario], cfg.strategies[c.strategy], c.seed, cfg.master_seed,
                             cfg.options, cfg.keep_logs);
    }
  };
  std::size_t n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min(n, cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rep;
}

namespace detail {
inline std::string csv_number(const nlohmann::json& v) {
  if (v.is_null()) return "";
  return v.dump();
}
}  // namespace detail

inline constexpr std::array kMetricColumns = {"steps", "D",     "B",     "B_full", "J",     "N_v",  "correct",
                                              "targets", "V",   "eta_P", "eta_B",  "eta_J", "eta_v"};

inline std::string bench_csv(const BenchReport& rep) {
  std::ostringstream out;
  out << "scenario,strategy,seed_index,seed,status,end_reason";
  for (auto c : kMetricColumns) out << ',' << c;
  out << ",error\n";
  for (const auto& r : rep.rows) {
    out << r.scenario << ',' << r.strategy << ',' << r.seed_index << ',' << hex64(r.seed) << ','
        << (r.ok ? "ok" : "error") << ',' << r.end_reason;
    const auto m = to_json(r.metrics);
    for (auto c : kMetricColumns) out << ',' << (r.ok ? detail::csv_number(m[c]) : "");
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << ',' << err << '\n';
  }
  return out.str();
}

/// Mean of each metric over successful seeds, per (scenario, strategy).
/// Ratio means skip seeds where the ratio is absent.
inline nlohmann::json bench_summary(const BenchReport& rep) {
  std::map<std::pair<std::string, std::string>, std::vector<const BenchRow*>> groups;
  for (const auto& r : rep.rows) groups[{r.scenario, r.strategy}].push_back(&r);
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [key, rows] : groups) {
    nlohmann::json g = {{"scenario", key.first}, {"strategy", key.second}};
    std::size_t ok = 0;
    for (auto* r : rows) ok += r->ok;
    g["runs"] = rows.size();
    g["errors"] = rows.size() - ok;
    for (auto c : kMetricColumns) {
      double sum = 0.0;
      std::size_t n = 0;
      for (auto* r : rows) {
        if (!r->ok) continue;
        const auto v = to_json(r->metrics)[c];
        if (v.is_null()) continue;
        sum += v.get<double>();
        ++n;
      }
      g[std::string("mean_") + c] = n ? nlohmann::json(sum / static_cast<double>(n)) : nlohmann::json(nullptr);
    }
    out.push_back(std::move(g));
  }
  return out;
}

inline nlohmann::json bench_json(const BenchReport& rep, const BenchConfig& cfg) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json j = {{"scenario", r.scenario}, {"strategy", r.strategy}, {"seed_index", r.seed_index},
                        {"seed", hex64(r.seed)},  {"status", r.ok ? "ok" : "error"}};
    if (r.ok) {
      j["end_reason"] = r.end_reason;
      j["metrics"] = to_json(r.metrics);
    } else {
      j["error"] = r.error;
    }
    rows.push_back(std::move(j));
  }
  nlohmann::json scen = nlohmann::json::array();
  for (const auto& s : cfg.scenarios) scen.push_back(to_json(s));
  nlohmann::json strats = nlohmann::json::array();
  for (auto s : cfg.strategies) strats.push_back(std::string(to_string(s)));
  return {{"master_seed", hex64(cfg.master_seed)}, {"seeds", cfg.seeds}, {"scenarios", std::move(scen)},
          {"strategies", std::move(strats)},       {"rows", std::move(rows)}, {"summary", bench_summary(rep)}};
}

/// Writes results.csv and results.json (plus one log per cell when kept).
inline void write_bench(const BenchReport& rep, const BenchConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write " + p.string());
    f << text;
  };
  write(dir / "results.csv", bench_csv(rep));
  write(dir / "results.json", bench_json(rep, cfg).dump(2) + "\n");
  if (!cfg.keep_logs) return;
  std::filesystem::create_directories(dir / "logs");
  for (const auto& r : rep.rows)
    if (r.log) {
      auto name = r.scenario + "_" + r.strategy + "_" + std::to_string(r.seed_index) + ".jsonl";
      std::replace(name.begin(), name.end(), '/', '_');
      write(dir / "logs" / name, to_jsonl(*r.log));
    }
}

}  // namespace hunt
