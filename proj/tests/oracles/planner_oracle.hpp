#pragma once

// Exhaustive reference for the sequence/allocation problem: every ordered
// subset of targets times every feature allocation within the budget.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "hunt/planner.hpp"

namespace oracle {

inline double exhaustive_plan_value(const hunt::PlanProblem& pb) {
  const auto r = pb.ids.size();
  const auto n = pb.prefix_info.size() - 1;
  const auto& w = pb.weights;
  double best = 0.0;  // the empty plan
  std::vector<std::size_t> seq;
  std::vector<bool> used(r, false);
  std::vector<std::size_t> alloc;

  // Every allocation for the current sequence, enumerated in full.
  auto best_alloc = [&](std::size_t count) {
    double out = -std::numeric_limits<double>::infinity();
    alloc.assign(count, 0);
    for (;;) {
      std::size_t spent = 0;
      double v = 0.0;
      for (auto m : alloc) {
        spent += m;
        v += w.info * pb.prefix_info[m] - w.cost * static_cast<double>(m);
      }
      if (spent <= pb.budget) out = std::max(out, v);
      std::size_t i = 0;
      while (i < count && ++alloc[i] > n) alloc[i++] = 0;
      if (i == count) break;
    }
    return out;
  };
  std::function<void(std::size_t, double)> walk = [&](std::size_t at, double length) {
    best = std::max(best, best_alloc(seq.size()) - w.distance * length);
    for (std::size_t i = 0; i < r; ++i) {
      if (used[i]) continue;
      const double d = pb.dist[at][i + 1];
      if (!std::isfinite(d) || length + d > pb.max_length) continue;
      used[i] = true;
      seq.push_back(i);
      walk(i + 1, length + d);
      seq.pop_back();
      used[i] = false;
    }
  };
  walk(0, 0.0);
  return best;
}

}  // namespace oracle
