// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Oracles come from tests/oracles; nothing here reads the
// library's own answers back as ground truth.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hunt/hunt.hpp"
#include "oracles/bayes_oracle.hpp"
#include "oracles/log_oracle.hpp"
#include "oracles/planner_oracle.hpp"
#include "support/session_script.hpp"

using namespace hunt;

namespace {

constexpr std::uint64_t kMaster = 20240611;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------------ 1

Result propositions() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(derive_seed(kMaster, "props"));
  std::size_t violations = 0, checks = 0, pg_bound_instances = 0, lo_bound_instances = 0;
  TimePressureConfig tp;
  const double lambda = tp.lambda_ms;
  auto count_pg = [&](const RankedFeatures& r, double t) {
    tp.decision_time_ms = t;
    return h_probgain(tp, r);
  };
  auto count_lo = [&](double v0, const RankedFeatures& r, double t) {
    tp.decision_time_ms = t;
    return h_logodds(tp, v0, r);
  };
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++violations;
  };
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(lambda * 0.05 * std::pow(10.0, 5.0 * i / 49.0));

  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t p = 2 + rng.index(7);
    RandomNetOptions o;
    o.features = p;
    o.max_arity = 3;
    const auto net = random_net(rng, o);

    // ProbGain side: take each feature's most favourable value so every
    // information value is nonnegative.
    std::vector<std::size_t> best_obs(p);
    for (std::size_t l = 0; l < p; ++l) {
      double best = -1.0;
      for (std::size_t x = 0; x < net.features()[l].arity(); ++x)
        if (double g = prob_gain(net, l, x); g > best) {
          best = g;
          best_obs[l] = x;
        }
    }
    auto pg = rank_by_prob_gain(net, best_obs);
    for (auto& v : pg.values) v = std::max(v, 0.0);
    bool distinct_positive = pg.values.back() > 0.0;
    for (std::size_t i = 1; i < p; ++i) distinct_positive = distinct_positive && pg.values[i] < pg.values[i - 1];
    if (distinct_positive) {
      ++pg_bound_instances;
      const double alpha = pg.values.back() / pg.values.front();
      const double t1 = lambda * static_cast<double>(p) / std::log1p(alpha / static_cast<double>(p));
      for (double f : {1.0 + 1e-6, 1.5, 10.0}) expect(count_pg(pg, t1 * f) == p);
    }
    const double t2 = lambda / std::log(static_cast<double>(p));
    for (double f : {1.0 - 1e-6, 0.5, 0.1}) expect(count_pg(pg, t2 * f) == 1);
    std::size_t prev = 0;
    for (double t : grid) {
      const auto c = count_pg(pg, t);
      expect(c >= prev);
      prev = c;
    }

    // LogOdds side: an arbitrary observation.
    std::vector<std::size_t> obs(p);
    for (std::size_t l = 0; l < p; ++l) obs[l] = rng.index(net.features()[l].arity());
    const auto lo = rank_by_abs_log_odds(net, obs);
    const double v0 = prior_log_odds(net);
    if (lo.values.front() != 0.0) {
      const double a = std::abs(1.0 + v0 / lo.values.front());
      if (a > 0.0) {
        ++lo_bound_instances;
        const double t4 = lambda / std::log1p(static_cast<double>(p - 1) / a);
        for (double f : {1.0 - 1e-6, 0.5, 0.1}) expect(count_lo(v0, lo, t4 * f) == 1);
      }
    }
    prev = 0;
    for (double t : grid) {
      const auto c = count_lo(v0, lo, t);
      expect(c >= prev);
      prev = c;
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 30.0,
          fmt("%zu violations in %zu checks (1000 instances, %zu single-feature ProbGain bounds, %zu single-feature LogOdds bounds), %.2fs", violations,
              checks, pg_bound_instances, lo_bound_instances, secs)};
}

// ------------------------------------------------------------------ 2

Result oracle_equivalence() {
  Rng rng(derive_seed(kMaster, "oracle"));
  double worst = 0.0;
  std::size_t map_mismatch = 0, comparisons = 0;
  auto diff = [&](double a, double b) {
    ++comparisons;
    worst = std::max(worst, std::abs(a - b));
  };
  for (int inst = 0; inst < 200; ++inst) {
    RandomNetOptions o;
    o.features = 1 + rng.index(6);
    o.classes = 2 + rng.index(2);
    o.max_arity = 3;
    o.floor = rng.uniform(0.0, 0.3);
    const auto net = random_net(rng, o);
    const auto joint = oracle::enumerate(net);
    const auto n = net.feature_count();
    for (int e = 0; e < 12; ++e) {
      std::vector<std::optional<std::size_t>> ev(n);
      Evidence lib(n);
      for (std::size_t l = 0; l < n; ++l)
        if (rng.bernoulli(0.5)) {
          ev[l] = rng.index(net.features()[l].arity());
          lib.observe(l, *ev[l]);
        }
      const auto want = oracle::posterior(joint, ev);
      const auto got = posterior(net, lib);
      for (std::size_t y = 0; y < want.size(); ++y) diff(got.probs[y], want[y]);
      auto sorted = want;
      std::sort(sorted.rbegin(), sorted.rend());
      if (sorted[0] - sorted[1] > 1e-9 && map_class(net, lib) != oracle::map_class(joint, ev)) ++map_mismatch;
    }
    for (int s = 0; s < 6; ++s) {
      std::vector<std::size_t> subset;
      for (std::size_t l = 0; l < n; ++l)
        if (rng.bernoulli(0.5)) subset.push_back(l);
      diff(mutual_information(net, subset), oracle::mutual_information(joint, subset));
    }
    const auto prefix = prefix_information(net);
    for (std::size_t m = 0; m <= n; ++m) {
      const double want = oracle::prefix_information(joint, m);
      diff(expected_info_first_m(net, m), want);
      diff(prefix[m], want);
    }
  }
  return {worst <= 1e-9 && map_mismatch == 0,
          fmt("max abs error %.3g over %zu comparisons, %zu MAP mismatches (200 nets)", worst, comparisons,
              map_mismatch)};
}

// ------------------------------------------------------------------ 3

Result passive_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto split = ingest_car_eval_file(std::string(HUNT_DATA_DIR) + "/car_evaluation.csv", 0);
  const auto net = learn_cpts(split.train, 1.0);
  const auto rep = run_passive_bench(split.test, net, PassiveBenchConfig{});
  bool decreasing = true;
  std::string trend;
  for (auto h : {HeuristicId::ProbGain, HeuristicId::LogOdds, HeuristicId::InfoFree}) {
    const double none = rep.find(h, "none")->mean_features, mod = rep.find(h, "moderate")->mean_features,
                 intense = rep.find(h, "intense")->mean_features;
    decreasing = decreasing && intense < none && mod <= none && intense <= mod;
    trend += fmt(" %s %.2f>%.2f>%.2f;", std::string(to_string(h)).c_str(), none, mod, intense);
  }
  const double base = rep.find(HeuristicId::BayesAll, "moderate")->accuracy;
  double best = 0.0;
  for (auto h : {HeuristicId::ProbGain, HeuristicId::LogOdds, HeuristicId::InfoFree})
    best = std::max(best, rep.find(h, "moderate")->accuracy);
  const double secs = seconds_since(t0);
  const bool sizes = split.train.size() == 1228 && split.test.size() == 500;
  return {decreasing && best >= base - 0.01 && sizes && secs < 60.0,
          fmt("features%s moderate best %.3f vs all-feature %.3f, split %zu/%zu, %.2fs", trend.c_str(), best, base,
              split.train.size(), split.test.size(), secs)};
}

// ------------------------------------------------------------------ 4

Result work_bound() {
  Rng rng(derive_seed(kMaster, "work"));
  double worst_c = 0.0;
  bool below_subsets = true;
  for (std::size_t p = 2; p <= 64; ++p) {
    RandomNetOptions o;
    o.features = p;
    const auto net = random_net(rng, o);
    for (int rep = 0; rep < 5; ++rep) {
      const auto [y, obs] = sample_instance(net, rng);
      for (auto h : {HeuristicId::ProbGain, HeuristicId::LogOdds, HeuristicId::InfoFree}) {
        WorkCounter w;
        TimePressureConfig tp;
        tp.decision_time_ms = rng.uniform(100.0, 5000.0);
        (void)classify_under_pressure(net, obs, tp, h, &w);
        const double pp = static_cast<double>(p);
        worst_c = std::max(worst_c, static_cast<double>(w.total()) / (pp * std::log2(pp) + pp));
        if (p >= 8 && static_cast<double>(w.total()) >= std::ldexp(1.0, static_cast<int>(p))) below_subsets = false;
      }
    }
  }
  return {worst_c <= 4.0 && below_subsets,
          fmt("max work / (p log2 p + p) = %.2f for p in 2..64, all three heuristics", worst_c)};
}

// ------------------------------------------------------------------ 5

Result budget_invariant() {
  BenchConfig cfg;
  cfg.strategies.assign(kAllStrategies.begin(), kAllStrategies.end());
  for (const auto& name : layouts::names()) {
    ScenarioSpec s;
    s.layout_ref = name;
    s.pressure.horizon = 1500;
    s.pressure.budget = name == "human10x10" ? 12 : 20;
    cfg.scenarios.push_back(s);
  }
  cfg.seeds = 9;
  cfg.master_seed = derive_seed(kMaster, "matrix");
  cfg.keep_logs = true;
  const auto rep = run_matrix(cfg);
  std::size_t errors = 0, violations = 0, at_budget = 0;
  for (const auto& r : rep.rows) {
    if (!r.ok) {
      ++errors;
      continue;
    }
    const auto t = oracle::scan_log(to_jsonl(*r.log));
    if (t.spent > t.budget || t.max_j > t.budget || r.metrics.spent > t.budget) ++violations;
    if (t.spent == t.budget) ++at_budget;
  }
  return {rep.rows.size() >= 500 && errors == 0 && violations == 0,
          fmt("%zu runs, %zu errors, %zu logs with J > R, %zu runs spent the whole budget", rep.rows.size(), errors,
              violations, at_budget)};
}

// ------------------------------------------------------------------ 6

Result fog_split() {
  constexpr std::size_t kSeeds = 20;
  constexpr std::size_t kStepCap = 10000;
  ScenarioSpec spec;
  spec.layout_ref = "fog20x20";
  spec.pressure.fog_radius = 1.0;
  spec.pressure.horizon = kStepCap;
  std::size_t pairs = 0, empty = 0;
  std::map<StrategyId, double> share;
  const std::array strategies = {StrategyId::PlannerPrm, StrategyId::PlannerCellDecomp, StrategyId::AdaptiveSwitch};
  for (std::size_t i = 0; i < kSeeds; ++i) {
    const auto seed = cell_seed(derive_seed(kMaster, "fog"), spec.layout_ref, i);
    const auto sc = sample_scenario(spec, seed);
    const auto fov = sc.config.passive_fov();
    for (std::size_t a = 0; a < sc.workspace.targets.size(); ++a)
      for (std::size_t b = a + 1; b < sc.workspace.targets.size(); ++b) {
        const int ids[2] = {static_cast<int>(a), static_cast<int>(b)};
        ++pairs;
        if (!set_visibility_nonempty(ids, fov, sc.workspace)) ++empty;
      }
    for (auto sid : strategies) {
      auto s = make_strategy(sid, {}, seed);
      const auto m = compute_metrics(run(sc.workspace, sc.net, sc.config, *s, seed));
      share[sid] += static_cast<double>(m.classified) / static_cast<double>(m.targets) / kSeeds;
    }
  }
  const double empty_share = static_cast<double>(empty) / static_cast<double>(pairs);
  const bool ok = empty_share >= 0.95 && share[StrategyId::PlannerPrm] <= 0.2 &&
                  share[StrategyId::PlannerCellDecomp] <= 0.2 && share[StrategyId::AdaptiveSwitch] >= 0.8;
  return {ok, fmt("pairs with empty joint visibility %.1f%% of %zu; classified share prm %.2f, celldecomp %.2f, "
                  "adaptive_switch %.2f (cap %zu steps, %zu seeds)",
                  100.0 * empty_share, pairs, share[StrategyId::PlannerPrm], share[StrategyId::PlannerCellDecomp],
                  share[StrategyId::AdaptiveSwitch], kStepCap, kSeeds)};
}

// ------------------------------------------------------------------ 7

Result dominance() {
  BenchConfig cfg;
  cfg.strategies = {StrategyId::AdaptiveSwitch, StrategyId::RandomWalk, StrategyId::Coverage,
                    StrategyId::ForwardExplore};
  cfg.seeds = 10;
  cfg.master_seed = derive_seed(kMaster, "dominance");
  for (const char* layout : {"roomA", "roomB"})
    for (std::size_t n : {7, 13, 15}) {
      ScenarioSpec s;
      s.layout_ref = layout;
      s.target_count = n;
      cfg.scenarios.push_back(s);
    }
  const auto rep = run_matrix(cfg);
  // Rows are ordered scenario, strategy, seed; pair them up by position.
  std::map<std::string, std::vector<const BenchRow*>> by_strategy;
  for (const auto& r : rep.rows) by_strategy[r.strategy].push_back(&r);
  auto mean_eta = [&](StrategyId id) {
    double s = 0.0;
    for (auto* r : by_strategy[std::string(to_string(id))]) s += r->metrics.visitation_efficiency.value_or(0.0);
    return s / static_cast<double>(by_strategy[std::string(to_string(id))].size());
  };
  const double as = mean_eta(StrategyId::AdaptiveSwitch), rw = mean_eta(StrategyId::RandomWalk),
               cov = mean_eta(StrategyId::Coverage);
  const auto& a = by_strategy["adaptive_switch"];
  const auto& f = by_strategy["forward_explore"];
  double d_as = 0.0, d_fe = 0.0;
  std::size_t paired = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto n = std::min(a[i]->metrics.classified, f[i]->metrics.classified);
    if (n == 0) continue;
    d_as += a[i]->metrics.distance_at(n);
    d_fe += f[i]->metrics.distance_at(n);
    ++paired;
  }
  const double ratio = paired ? d_as / d_fe : 1.0;
  bool errors = false;
  for (const auto& r : rep.rows) errors = errors || !r.ok;
  return {!errors && as >= 1.5 * rw && as >= 1.5 * cov && paired > 0 && ratio <= 0.8,
          fmt("eta_v adaptive_switch %.4f, random_walk %.4f (x%.2f), coverage %.4f (x%.2f); "
              "D at equal N_v adaptive_switch/forward_explore = %.2f over %zu paired runs",
              as, rw, as / rw, cov, as / cov, ratio, paired)};
}

// ------------------------------------------------------------------ 8

Result planner_exactness() {
  Rng rng(derive_seed(kMaster, "planner"));
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    PlanProblem pb;
    const auto r = 1 + rng.index(5);
    RandomNetOptions o;
    o.features = 1 + rng.index(4);
    auto net = random_net(rng, o);
    pb.prefix_info = prefix_information(net);
    pb.weights = {rng.uniform(0.5, 3.0), rng.uniform(0.01, 0.3), rng.uniform(0.0, 0.3)};
    pb.budget = rng.index(r * o.features + 1);
    if (rng.bernoulli(0.3)) pb.max_length = rng.uniform(3.0, 15.0);
    std::vector<Vec2> pts{{rng.uniform(0, 10), rng.uniform(0, 10)}};
    for (std::size_t i = 0; i < r; ++i) {
      pb.ids.push_back(static_cast<int>(i));
      pts.push_back({rng.uniform(0, 10), rng.uniform(0, 10)});
    }
    pb.dist.assign(r + 1, std::vector<double>(r + 1));
    for (std::size_t a = 0; a <= r; ++a)
      for (std::size_t b = 0; b <= r; ++b) pb.dist[a][b] = distance(pts[a], pts[b]) * (a == b ? 0.0 : 1.3);
    // Occasional unreachable pair, but keep one target reachable from the start.
    if (r > 1 && rng.bernoulli(0.2)) {
      const auto a = 1 + rng.index(r), b = 1 + rng.index(r);
      pb.dist[a][b] = pb.dist[b][a] = a == b ? 0.0 : std::numeric_limits<double>::infinity();
    }
    pb.max_length = std::max(pb.max_length, pb.dist[0][1]);
    const auto got = plan(pb);
    const double want = oracle::exhaustive_plan_value(pb);
    const double err = std::abs(got.value - want);
    worst = std::max(worst, err);
    if (err > 1e-9 || !got.exact) ++mismatches;
  }

  // Clear visibility: receding planners against every heuristic strategy.
  constexpr std::size_t kSeeds = 10;
  ScenarioSpec spec;
  spec.layout_ref = "human10x10";
  const std::array heuristics = {StrategyId::AdaptiveSwitch, StrategyId::ForwardExplore, StrategyId::WallFollow,
                                 StrategyId::Coverage, StrategyId::RandomWalk};
  std::size_t losses = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double mean_planner = 0.0, mean_best_heuristic = 0.0;
  for (std::size_t i = 0; i < kSeeds; ++i) {
    const auto seed = cell_seed(derive_seed(kMaster, "clear"), spec.layout_ref, i);
    const auto sc = sample_scenario(spec, seed);
    auto value = [&](StrategyId id) {
      auto s = make_strategy(id, {}, seed);
      return compute_metrics(run(sc.workspace, sc.net, sc.config, *s, seed)).value;
    };
    double best_h = -std::numeric_limits<double>::infinity();
    for (auto h : heuristics) best_h = std::max(best_h, value(h));
    for (auto p : {StrategyId::PlannerPrm, StrategyId::PlannerCellDecomp}) {
      const double v = value(p);
      min_margin = std::min(min_margin, v - best_h);
      if (v < best_h) ++losses;
      mean_planner += v / (2.0 * kSeeds);
    }
    mean_best_heuristic += best_h / kSeeds;
  }
  return {mismatches == 0 && losses == 0,
          fmt("B&B vs exhaustive: %zu mismatches in 100 (max diff %.2g); clear visibility: %zu planner runs below "
              "the best heuristic, min margin %.2f, mean V planner %.2f vs best heuristic %.2f",
              mismatches, worst, losses, min_margin, mean_planner, mean_best_heuristic)};
}

// ------------------------------------------------------------------ 9

Result loglik_direction() {
  constexpr std::size_t kRuns = 100;
  ScenarioSpec spec;
  spec.layout_ref = "roomA";
  spec.pressure.horizon = 1500;
  std::size_t as_right = 0, fe_right = 0;
  for (std::size_t i = 0; i < kRuns; ++i) {
    const auto seed = cell_seed(derive_seed(kMaster, "loglik"), spec.layout_ref, i);
    const auto sc = sample_scenario(spec, seed);
    for (auto id : {StrategyId::AdaptiveSwitch, StrategyId::ForwardExplore}) {
      auto s = make_strategy(id, {}, seed);
      const auto log = run(sc.workspace, sc.net, sc.config, *s, seed);
      const double la = trajectory_log_likelihood(log, LoglikModel::AdaptiveSwitch);
      const double lf = trajectory_log_likelihood(log, LoglikModel::ForwardExplore);
      if (id == StrategyId::AdaptiveSwitch && la > lf) ++as_right;
      if (id == StrategyId::ForwardExplore && lf > la) ++fe_right;
    }
  }
  return {as_right >= 90 && fe_right >= 90,
          fmt("adaptive_switch runs favour their own model %zu/%zu, forward_explore runs %zu/%zu", as_right, kRuns,
              fe_right, kRuns)};
}

// ------------------------------------------------------------------ 10

Result determinism() {
  std::size_t runs = 0, failures = 0;
  for (const auto& name : layouts::names())
    for (auto sid : kAllStrategies)
      for (std::size_t i = 0; i < 2; ++i) {
        ScenarioSpec spec;
        spec.layout_ref = name;
        spec.pressure.horizon = 600;
        const auto seed = cell_seed(derive_seed(kMaster, "determinism"), name, i);
        auto once = [&] {
          const auto sc = sample_scenario(spec, seed);
          auto s = make_strategy(sid, {}, seed);
          auto log = run(sc.workspace, sc.net, sc.config, *s, seed);
          return to_jsonl(log);
        };
        const auto a = once(), b = once();
        const auto rep = replay(parse_jsonl(a));
        ++runs;
        if (a != b || !rep.identical) ++failures;
      }
  std::size_t sessions = 0, session_failures = 0;
  for (const auto& name : {"human10x10", "fog20x20", "roomA", "maze2"})
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      SessionManager m1, m2;
      const auto create = support::create_message(name, seed);
      const auto played = support::play(m1, create, seed * 7, 300);
      const auto again = support::replay_blind(m2, played);
      ++sessions;
      if (played.jsonl != again || !replay(parse_jsonl(played.jsonl)).identical) ++session_failures;
    }
  return {failures == 0 && session_failures == 0,
          fmt("%zu/%zu engine runs and %zu/%zu sessions reproduced byte-identical logs", runs - failures, runs,
              sessions - session_failures, sessions)};
}

}  // namespace

int main() {
  const std::vector<std::function<Result()>> criteria = {propositions,     oracle_equivalence, passive_trend,
                                                         work_bound,       budget_invariant,   fog_split,
                                                         dominance,        planner_exactness,  loglik_direction,
                                                         determinism};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i]();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failed;
    std::printf("criterion %zu: %s  %s [%.1fs]\n", i + 1, r.pass ? "PASS" : "FAIL", r.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
