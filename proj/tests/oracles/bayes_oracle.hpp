#pragma once

// Brute-force reference for the naive Bayes queries: materialises the full
// joint P(y, x_1..x_n) and marginalises. Exponential in n, so small nets only.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "hunt/bayes.hpp"

namespace oracle {

struct Joint {
  std::vector<std::size_t> arity;          // per feature
  std::vector<std::vector<std::size_t>> x;  // every assignment, odometer order
  std::vector<std::vector<double>> p;       // p[a][y] = P(y, x_a)
};

inline Joint enumerate(const hunt::BayesNet& net) {
  Joint j;
  const auto n = net.feature_count();
  for (std::size_t l = 0; l < n; ++l) j.arity.push_back(net.features()[l].arity());
  std::vector<std::size_t> cur(n, 0);
  for (;;) {
    std::vector<double> row(net.classes());
    for (std::size_t y = 0; y < net.classes(); ++y) {
      double v = net.prior()[y];
      for (std::size_t l = 0; l < n; ++l) v *= net.cpt(l)(cur[l], y);
      row[y] = v;
    }
    j.x.push_back(cur);
    j.p.push_back(std::move(row));
    std::size_t l = 0;
    while (l < n && ++cur[l] == j.arity[l]) cur[l++] = 0;
    if (l == n) break;
  }
  return j;
}

/// P(y | partial evidence) by summing the joint over unobserved features.
inline std::vector<double> posterior(const Joint& j, const std::vector<std::optional<std::size_t>>& ev) {
  std::vector<double> out(j.p.front().size(), 0.0);
  for (std::size_t a = 0; a < j.x.size(); ++a) {
    bool match = true;
    for (std::size_t l = 0; l < ev.size(); ++l)
      if (ev[l] && j.x[a][l] != *ev[l]) match = false;
    if (!match) continue;
    for (std::size_t y = 0; y < out.size(); ++y) out[y] += j.p[a][y];
  }
  double z = 0.0;
  for (double v : out) z += v;
  for (double& v : out) v /= z;
  return out;
}

inline std::size_t map_class(const Joint& j, const std::vector<std::optional<std::size_t>>& ev) {
  const auto p = posterior(j, ev);
  std::size_t best = 0;
  for (std::size_t y = 1; y < p.size(); ++y)
    if (p[y] > p[best]) best = y;
  return best;
}

/// I(Y; X_S) = sum over (y, x_S) of p log2(p / (p(y) p(x_S))).
inline double mutual_information(const Joint& j, const std::vector<std::size_t>& subset) {
  const auto k = j.p.front().size();
  // Marginal over the subset, keyed by the mixed-radix code of x_S.
  std::vector<std::vector<double>> m;
  std::size_t cells = 1;
  for (auto l : subset) cells *= j.arity[l];
  m.assign(cells, std::vector<double>(k, 0.0));
  std::vector<double> py(k, 0.0);
  for (std::size_t a = 0; a < j.x.size(); ++a) {
    std::size_t code = 0;
    for (auto l : subset) code = code * j.arity[l] + j.x[a][l];
    for (std::size_t y = 0; y < k; ++y) {
      m[code][y] += j.p[a][y];
      py[y] += j.p[a][y];
    }
  }
  double mi = 0.0;
  for (const auto& row : m) {
    double px = 0.0;
    for (double v : row) px += v;
    for (std::size_t y = 0; y < k; ++y)
      if (row[y] > 0.0) mi += row[y] * std::log2(row[y] / (px * py[y]));
  }
  return mi;
}

inline double prefix_information(const Joint& j, std::size_t m) {
  std::vector<std::size_t> s;
  for (std::size_t l = 0; l < m; ++l) s.push_back(l);
  return mutual_information(j, s);
}

}  // namespace oracle
