#pragma once

// Budgeted visitation planning: choose which known targets to visit, in
// what order, and how many features to reveal at each, maximizing
//   V = sum_i [w_B I(Y; X_1..m_i) - w_J m_i] - w_D * path length
// with sum_i m_i <= R. Exact branch-and-bound up to kExactLimit targets,
// beam search beyond. Also the receding-horizon strategy that replans as
// targets are detected.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hunt/bayes.hpp"
#include "hunt/error.hpp"
#include "hunt/policies.hpp"
#include "hunt/roadmap.hpp"
#include "hunt/sim.hpp"
#include "hunt/strategies.hpp"

namespace hunt {

inline constexpr std::size_t kExactLimit = 10;
inline constexpr std::size_t kBeamWidth = 64;

/// Abstract instance: node 0 is the start, node i+1 is target ids[i].
struct PlanProblem {
  std::vector<int> ids;
  std::vector<std::vector<double>> dist;  // (r+1) x (r+1), infinity when unreachable
  std::vector<double> prefix_info;        // I(Y; X_1..m), m = 0..n
  ObjectiveWeights weights;
  std::size_t budget = 0;
  double max_length = std::numeric_limits<double>::infinity();
};

struct PlanSolution {
  std::vector<int> sequence;
  std::vector<std::size_t> features;  // m_i aligned with sequence
  std::vector<Vec2> path;
  double value = 0.0;
  double info = 0.0;
  double length = 0.0;
  std::size_t spent = 0;
  bool exact = true;
};

/// Best total of w_B I(m) - w_J m over c targets sharing r features, for
/// every c; each target uses the same prefix curve.
struct AllocationTable {
  std::vector<double> best;                       // by target count, best over r <= R
  std::vector<std::vector<std::size_t>> choice;   // allocations achieving best[c]

  static AllocationTable build(const std::vector<double>& prefix_info, const ObjectiveWeights& w,
                               std::size_t budget, std::size_t max_targets) {
    const std::size_t n = prefix_info.size() - 1;
    auto f = [&](std::size_t m) { return w.info * prefix_info[m] - w.cost * static_cast<double>(m); };
    const double neg = -std::numeric_limits<double>::infinity();
    // dp[c][r]: best value with c targets using exactly r features.
    std::vector<std::vector<double>> dp(max_targets + 1, std::vector<double>(budget + 1, neg));
    std::vector<std::vector<std::size_t>> arg(max_targets + 1, std::vector<std::size_t>(budget + 1, 0));
    dp[0][0] = 0.0;
    for (std::size_t c = 1; c <= max_targets; ++c)
      for (std::size_t r = 0; r <= budget; ++r)
        for (std::size_t m = 0; m <= std::min(n, r); ++m) {
          if (dp[c - 1][r - m] == neg) continue;
          const double v = dp[c - 1][r - m] + f(m);
          if (v > dp[c][r]) {
            dp[c][r] = v;
            arg[c][r] = m;
          }
        }
    AllocationTable t;
    t.best.assign(max_targets + 1, neg);
    t.choice.resize(max_targets + 1);
    for (std::size_t c = 0; c <= max_targets; ++c) {
      std::size_t best_r = 0;
      for (std::size_t r = 0; r <= budget; ++r)
        if (dp[c][r] > t.best[c]) {
          t.best[c] = dp[c][r];
          best_r = r;
        }
      if (t.best[c] == neg) continue;
      std::size_t r = best_r;
      for (std::size_t k = c; k > 0; --k) {
        const auto m = arg[k][r];
        t.choice[c].push_back(m);
        r -= m;
      }
      std::sort(t.choice[c].begin(), t.choice[c].end(), std::greater<>());
    }
    return t;
  }
};

namespace detail {
struct PlanSearch {
  const PlanProblem& pb;
  AllocationTable alloc;
  std::vector<double> suffix_best;  // max_{c' >= c} alloc.best[c']
  std::vector<int> best_seq;
  double best_value = -std::numeric_limits<double>::infinity();
  double best_length = 0.0;
  std::vector<int> seq;
  std::vector<bool> used;

  explicit PlanSearch(const PlanProblem& p)
      : pb(p), alloc(AllocationTable::build(p.prefix_info, p.weights, p.budget, p.ids.size())) {
    const auto r = p.ids.size();
    suffix_best.assign(r + 2, -std::numeric_limits<double>::infinity());
    for (std::size_t c = r + 1; c-- > 0;) suffix_best[c] = std::max(suffix_best[c + 1], alloc.best[c]);
    used.assign(r, false);
  }

  void consider(double length) {
    const double v = alloc.best[seq.size()] - pb.weights.distance * length;
    if (v > best_value) {
      best_value = v;
      best_seq = seq;
      best_length = length;
    }
  }

  void dfs(std::size_t at, double length) {
    consider(length);
    // Admissible: future legs only add length.
    if (suffix_best[seq.size() + 1] - pb.weights.distance * length <= best_value) return;
    for (std::size_t i = 0; i < pb.ids.size(); ++i) {
      if (used[i]) continue;
      const double d = pb.dist[at][i + 1];
      if (!std::isfinite(d) || length + d > pb.max_length) continue;
      used[i] = true;
      seq.push_back(static_cast<int>(i));
      dfs(i + 1, length + d);
      seq.pop_back();
      used[i] = false;
    }
  }

  void beam() {
    struct Partial {
      std::vector<int> seq;
      std::vector<bool> used;
      std::size_t at = 0;
      double length = 0.0;
    };
    std::vector<Partial> layer{{{}, std::vector<bool>(pb.ids.size(), false), 0, 0.0}};
    consider(0.0);
    while (!layer.empty()) {
      std::vector<Partial> next;
      for (const auto& p : layer)
        for (std::size_t i = 0; i < pb.ids.size(); ++i) {
          if (p.used[i]) continue;
          const double d = pb.dist[p.at][i + 1];
          if (!std::isfinite(d) || p.length + d > pb.max_length) continue;
          Partial q = p;
          q.seq.push_back(static_cast<int>(i));
          q.used[i] = true;
          q.at = i + 1;
          q.length += d;
          next.push_back(std::move(q));
        }
      std::stable_sort(next.begin(), next.end(),
                       [](const Partial& a, const Partial& b) { return a.length < b.length; });
      if (next.size() > kBeamWidth) next.resize(kBeamWidth);
      for (const auto& q : next) {
        seq = q.seq;
        consider(q.length);
      }
      layer = std::move(next);
    }
  }
};
}  // namespace detail

/// Solves the abstract problem; the returned path is empty (see plan_on_roadmap).
inline PlanSolution plan(const PlanProblem& pb) {
  require(!pb.prefix_info.empty(), ErrorCode::InvalidArgument, "prefix information curve is empty");
  require(pb.dist.size() == pb.ids.size() + 1, ErrorCode::InvalidArgument, "distance matrix size mismatch");
  pb.weights.validate();
  bool any = false;
  for (std::size_t i = 0; i < pb.ids.size(); ++i)
    if (std::isfinite(pb.dist[0][i + 1]) && pb.dist[0][i + 1] <= pb.max_length) any = true;
  require(any, ErrorCode::Infeasible, "no target is reachable");
  detail::PlanSearch s(pb);
  const bool exact = pb.ids.size() <= kExactLimit;
  if (exact) s.dfs(0, 0.0);
  else s.beam();
  PlanSolution out;
  out.exact = exact;
  out.value = s.best_value;
  out.length = s.best_length;
  const auto& ms = s.alloc.choice[s.best_seq.size()];
  for (std::size_t k = 0; k < s.best_seq.size(); ++k) {
    out.sequence.push_back(pb.ids[static_cast<std::size_t>(s.best_seq[k])]);
    out.features.push_back(ms[k]);
    out.info += pb.prefix_info[ms[k]];
    out.spent += ms[k];
  }
  // Visiting a target to reveal nothing only costs distance; drop the tail.
  while (!out.sequence.empty() && out.features.back() == 0) {
    out.sequence.pop_back();
    out.features.pop_back();
  }
  return out;
}

/// Builds the problem from roadmap distances, solves it and expands the path.
inline PlanSolution plan_on_roadmap(const Roadmap& rm, std::size_t start_node, const std::vector<int>& ids,
                                    const BayesNet& net, const ObjectiveWeights& w, std::size_t budget,
                                    double max_length = std::numeric_limits<double>::infinity()) {
  PlanProblem pb;
  pb.ids = ids;
  pb.prefix_info = prefix_information(net);
  pb.weights = w;
  pb.budget = budget;
  pb.max_length = max_length;
  std::vector<std::size_t> nodes{start_node};
  for (int id : ids) {
    auto it = rm.target_nodes.find(id);
    require(it != rm.target_nodes.end(), ErrorCode::InvalidArgument, "target " + std::to_string(id) + " not attached");
    nodes.push_back(it->second);
  }
  std::vector<ShortestPaths> sps;
  for (auto n : nodes) sps.push_back(dijkstra(rm, n));
  pb.dist.assign(nodes.size(), std::vector<double>(nodes.size()));
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = 0; b < nodes.size(); ++b) pb.dist[a][b] = sps[a].dist[nodes[b]];
  auto sol = plan(pb);
  // Recompute the length leg by leg so the path and D agree.
  sol.length = 0.0;
  std::size_t at = 0;
  sol.path.push_back(rm.nodes[start_node]);
  for (int id : sol.sequence) {
    const auto k = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin()) + 1;
    const auto leg = sps[at].path_to(nodes[k]);
    for (std::size_t i = 1; i < leg.size(); ++i) {
      sol.length += distance(rm.nodes[leg[i - 1]], rm.nodes[leg[i]]);
      sol.path.push_back(rm.nodes[leg[i]]);
    }
    at = k;
  }
  double base = 0.0;
  for (auto m : sol.features) base += w.info * pb.prefix_info[m] - w.cost * static_cast<double>(m);
  sol.value = base - w.distance * sol.length;
  return sol;
}

inline nlohmann::json to_json(const PlanSolution& s) {
  nlohmann::json path = nlohmann::json::array();
  for (auto p : s.path) path.push_back({p.x, p.y});
  return {{"sequence", s.sequence}, {"features", s.features}, {"path", std::move(path)}, {"V", s.value},
          {"B", s.info},            {"D", s.length},           {"J", s.spent},          {"exact", s.exact}};
}

// ---------------------------------------------------------------- online

enum class RoadmapMethod { Prm, CellDecomp };

struct PlannerParams {
  RoadmapMethod method = RoadmapMethod::Prm;
  PrmParams prm;
  double length_factor = 0.6;  // share of the remaining steps assumed usable for travel
};

/// Roadmap with the start pose and an observation node for every target of
/// `ws`; the offline, full-knowledge setting.
inline Roadmap build_full_roadmap(const WorkspaceSpec& ws, const PlannerParams& p, const SectorFov& interact,
                                  double footprint, std::size_t* start_node) {
  if (p.method == RoadmapMethod::Prm) return prm_build(ws, p.prm, interact, footprint, start_node);
  WorkspaceSpec map = ws;
  map.targets.clear();
  auto rm = celldecomp_build(map, footprint).roadmap;
  const auto s = rm.add_node(ws.start.position());
  rm.connect_visible(s, map);
  if (start_node) *start_node = s;
  for (const auto& t : ws.targets) attach_target(rm, map, t.id, t.position, interact, p.prm.seed);
  return rm;
}

/// Plans over every target of the workspace as if all were known.
inline PlanSolution plan_offline(const WorkspaceSpec& ws, const BayesNet& net, const SimConfig& cfg,
                                 const PlannerParams& p = {}) {
  std::size_t start = 0;
  const auto rm = build_full_roadmap(ws, p, cfg.sensors.interact, cfg.sensors.footprint, &start);
  std::vector<int> ids;
  for (const auto& t : ws.targets) ids.push_back(t.id);
  return plan_on_roadmap(rm, start, ids, net, cfg.weights, cfg.pressure.budget);
}

/// Replans whenever a new target is detected, follows the roadmap path to
/// each observation pose, reveals the planned number of features, then
/// classifies. With nothing known it holds position.
class RecedingPlanner : public Strategy {
 public:
  explicit RecedingPlanner(PlannerParams p = {}) : p_(p) {}

  std::string id() const override {
    return std::string(to_string(p_.method == RoadmapMethod::Prm ? StrategyId::PlannerPrm : StrategyId::PlannerCellDecomp));
  }
  nlohmann::json params() const override {
    return {{"samples", p_.prm.samples}, {"neighbors", p_.prm.neighbors}, {"roadmap_seed", p_.prm.seed}};
  }

  const std::optional<PlanSolution>& current_plan() const { return plan_; }
  std::size_t replans() const { return replans_; }
  std::uint64_t plan_hash() const { return plan_hash_; }

  bool done(const SimView& v) const override {
    return !plan_ && !pending_ && initialized_ && known_ids(v) == planned_for_;
  }

  Decision decide(const SimView& v, Rng&) override {
    if (!initialized_) init(v);
    const auto ids = known_ids(v);
    if (ids != planned_for_ || replan_) replan(v, ids);
    if (!plan_) return {ActionDecision::stop(), {}, "hold"};
    return execute(v);
  }

 private:
  std::set<int> known_ids(const SimView& v) const {
    std::set<int> ids;
    for (const auto& t : v.known_targets())
      if (!t.classified_as && !skipped_.count(t.id)) ids.insert(t.id);
    return ids;
  }

  void init(const SimView& v) {
    const auto& cfg = v.config();
    if (p_.method == RoadmapMethod::Prm) rm_ = prm_build(v.map(), p_.prm, cfg.sensors.footprint);
    else rm_ = celldecomp_build(v.map(), cfg.sensors.footprint).roadmap;
    initialized_ = true;
  }

  void replan(const SimView& v, const std::set<int>& ids) {
    replan_ = false;
    const auto& cfg = v.config();
    for (int id : ids) {
      if (rm_.target_nodes.count(id)) continue;
      try {
        attach_target(rm_, v.map(), id, v.known(id)->position, cfg.sensors.interact, p_.prm.seed);
      } catch (const HuntError& e) {
        if (e.code() != ErrorCode::TargetUnreachable) throw;
        skipped_.insert(id);
      }
    }
    planned_for_ = known_ids(v);
    plan_.reset();
    pending_.reset();
    waypoints_.clear();
    if (planned_for_.empty()) return;
    const auto here = rm_.add_node(v.pose().position());
    rm_.connect_visible(here, v.map());
    const std::vector<int> list(planned_for_.begin(), planned_for_.end());
    const double remaining = static_cast<double>(v.horizon() - v.step());
    try {
      auto sol = plan_on_roadmap(rm_, here, list, v.net(), cfg.weights, v.budget_left(),
                                 p_.length_factor * remaining * cfg.kinematics.max_step());
      ++replans_;
      plan_hash_ = fnv1a(to_json(sol).dump());
      if (sol.sequence.empty()) return;
      plan_ = std::move(sol);
      leg_ = 0;
      start_leg(v);
    } catch (const HuntError& e) {
      if (e.code() != ErrorCode::Infeasible) throw;
    }
  }

  void start_leg(const SimView& v) {
    waypoints_.clear();
    if (!plan_ || leg_ >= plan_->sequence.size()) {
      plan_.reset();
      return;
    }
    const int id = plan_->sequence[leg_];
    const auto goal = rm_.target_nodes.at(id);
    const auto here = rm_.add_node(v.pose().position());
    rm_.connect_visible(here, v.map());
    const auto sp = dijkstra(rm_, here);
    const auto path = sp.path_to(goal);
    if (path.empty()) {
      skipped_.insert(id);
      replan_ = true;
      plan_.reset();
      return;
    }
    for (std::size_t i = 1; i < path.size(); ++i) waypoints_.push_back(rm_.nodes[path[i]]);
    pending_ = id;
  }

  Decision execute(const SimView& v) {
    const auto& lim = v.config().kinematics;
    const Pose pose = v.pose();
    if (v.last_blocked()) {
      replan_ = true;
      return {ActionDecision::stop(), {}, "replan"};
    }
    while (!waypoints_.empty() && distance(pose.position(), waypoints_.front()) < 1e-9) waypoints_.erase(waypoints_.begin());
    if (!waypoints_.empty()) {
      const Vec2 d = waypoints_.front() - pose.position();
      const double err = wrap_angle(std::atan2(d.y, d.x) - pose.theta);
      if (std::abs(err) > 1e-9) return {turn_toward(pose, std::atan2(d.y, d.x), lim), {}, "travel"};
      return {ActionDecision::forward(std::min(lim.v_max, norm(d) / lim.dt), 0.0), {}, "travel"};
    }
    const int id = *pending_;
    const double face = rm_.target_headings.at(id);
    const auto& inter = v.interactable();
    const bool sensed = std::find(inter.begin(), inter.end(), id) != inter.end();
    if (!sensed && std::abs(wrap_angle(face - pose.theta)) > 1e-9) return {turn_toward(pose, face, lim), {}, "travel"};
    if (!sensed) {
      // Observation pose reached but the target is not measurable; give up on it.
      skipped_.insert(id);
      replan_ = true;
      return {ActionDecision::stop(), {}, "replan"};
    }
    const auto ev = v.evidence(id);
    const auto want = plan_->features[leg_];
    if (ev.observed_count() < want && v.budget_left() > 0)
      return {ActionDecision::stop(), TestDecision::reveal(id), "interact"};
    const auto label = posterior(v.net(), ev).argmax();
    ++leg_;
    pending_.reset();
    // The classification lands this step; the next decision starts the next leg.
    planned_for_.erase(id);
    if (leg_ < plan_->sequence.size()) start_leg_after_ = true;
    else plan_.reset();
    if (start_leg_after_) {
      start_leg_after_ = false;
      start_leg(v);
    }
    return {ActionDecision::stop(), TestDecision::classify(id, label), "interact"};
  }

  PlannerParams p_;
  Roadmap rm_;
  bool initialized_ = false;
  bool replan_ = false;
  bool start_leg_after_ = false;
  std::set<int> planned_for_;
  std::set<int> skipped_;
  std::optional<PlanSolution> plan_;
  std::size_t leg_ = 0;
  std::optional<int> pending_;
  std::vector<Vec2> waypoints_;
  std::size_t replans_ = 0;
  std::uint64_t plan_hash_ = 0;
};

}  // namespace hunt
