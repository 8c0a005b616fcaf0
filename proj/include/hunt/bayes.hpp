#pragma once

// Naive-structure Bayesian measurement model P(Y, X_1..X_n) with a fixed
// feature reveal order, plus the information quantities used by the
// heuristics, the simulator and the planners. Entropies are in bits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hunt/error.hpp"
#include "hunt/rng.hpp"

namespace hunt {

inline constexpr double kProbTolerance = 1e-12;
inline constexpr double kLogOddsFloor = 1e-9;

struct FeatureVar {
  std::string name;
  std::vector<std::string> values;

  std::size_t arity() const noexcept { return values.size(); }

  std::optional<std::size_t> index_of(std::string_view value) const {
    auto it = std::find(values.begin(), values.end(), value);
    if (it == values.end()) return std::nullopt;
    return static_cast<std::size_t>(it - values.begin());
  }

  void validate() const {
    require(values.size() >= 2, ErrorCode::InvalidArgument,
            "variable '" + name + "' needs arity >= 2");
    std::unordered_set<std::string> seen(values.begin(), values.end());
    require(seen.size() == values.size(), ErrorCode::InvalidArgument,
            "variable '" + name + "' has duplicate values");
  }
};

/// P(X_l = x | Y = y), stored row-major by feature value (one row per x,
/// one column per class).
class Cpt {
 public:
  Cpt() = default;
  Cpt(std::size_t arity, std::size_t classes, std::vector<double> table)
      : arity_(arity), classes_(classes), table_(std::move(table)) {
    require(table_.size() == arity_ * classes_, ErrorCode::ArityMismatch,
            "CPT table size does not match arity x classes");
  }

  double operator()(std::size_t x, std::size_t y) const { return table_[x * classes_ + y]; }
  std::size_t arity() const noexcept { return arity_; }
  std::size_t classes() const noexcept { return classes_; }
  std::span<const double> raw() const noexcept { return table_; }

 private:
  std::size_t arity_ = 0;
  std::size_t classes_ = 0;
  std::vector<double> table_;
};

/// Partial assignment feature-index -> observed value index.
class Evidence {
 public:
  Evidence() = default;
  explicit Evidence(std::size_t features) : values_(features) {}

  void observe(std::size_t feature, std::size_t value) {
    if (feature >= values_.size()) values_.resize(feature + 1);
    values_[feature] = value;
  }
  std::optional<std::size_t> value(std::size_t feature) const {
    return feature < values_.size() ? values_[feature] : std::nullopt;
  }
  std::size_t observed_count() const {
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); }));
  }
  std::size_t size() const noexcept { return values_.size(); }

  /// Evidence holding the listed features of a complete observation.
  static Evidence from_subset(std::span<const std::size_t> full, std::span<const std::size_t> features) {
    Evidence ev(full.size());
    for (auto l : features) ev.observe(l, full[l]);
    return ev;
  }
  static Evidence prefix(std::span<const std::size_t> full, std::size_t count) {
    Evidence ev(full.size());
    for (std::size_t l = 0; l < count && l < full.size(); ++l) ev.observe(l, full[l]);
    return ev;
  }

 private:
  std::vector<std::optional<std::size_t>> values_;
};

struct Posterior {
  std::vector<double> probs;

  double max() const { return *std::max_element(probs.begin(), probs.end()); }
  /// Lowest index among the maxima.
  std::size_t argmax() const {
    return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  }
};

/// Categorical records with one value index per feature and a class index.
struct CategoricalDataset {
  FeatureVar label;
  std::vector<FeatureVar> features;
  std::vector<std::vector<std::size_t>> rows;
  std::vector<std::size_t> labels;

  std::size_t size() const noexcept { return rows.size(); }
};

class BayesNet {
 public:
  BayesNet() = default;
  BayesNet(FeatureVar hypothesis, std::vector<FeatureVar> features, std::vector<double> prior,
           std::vector<Cpt> cpts)
      : hypothesis_(std::move(hypothesis)),
        features_(std::move(features)),
        prior_(std::move(prior)),
        cpts_(std::move(cpts)) {
    validate();
  }

  const FeatureVar& hypothesis() const noexcept { return hypothesis_; }
  const std::vector<FeatureVar>& features() const noexcept { return features_; }
  const std::vector<double>& prior() const noexcept { return prior_; }
  const Cpt& cpt(std::size_t feature) const { return cpts_.at(feature); }
  std::size_t classes() const noexcept { return hypothesis_.arity(); }
  std::size_t feature_count() const noexcept { return features_.size(); }

 private:
  void validate() const {
    hypothesis_.validate();
    for (const auto& f : features_) f.validate();
    const auto k = classes();
    require(prior_.size() == k, ErrorCode::ArityMismatch, "prior length != class count");
    require(std::all_of(prior_.begin(), prior_.end(), [](double p) { return p >= 0.0; }),
            ErrorCode::InvalidArgument, "negative prior entry");
    require(std::abs(std::accumulate(prior_.begin(), prior_.end(), 0.0) - 1.0) <= kProbTolerance,
            ErrorCode::InvalidArgument, "prior does not sum to 1");
    require(cpts_.size() == features_.size(), ErrorCode::ArityMismatch, "one CPT per feature required");
    for (std::size_t l = 0; l < cpts_.size(); ++l) {
      const auto& c = cpts_[l];
      require(c.arity() == features_[l].arity() && c.classes() == k, ErrorCode::ArityMismatch,
              "CPT shape mismatch for feature '" + features_[l].name + "'");
      for (std::size_t y = 0; y < k; ++y) {
        double col = 0.0;
        for (std::size_t x = 0; x < c.arity(); ++x) {
          require(c(x, y) >= 0.0, ErrorCode::InvalidArgument, "negative CPT entry");
          col += c(x, y);
        }
        require(std::abs(col - 1.0) <= kProbTolerance, ErrorCode::InvalidArgument,
                "CPT column does not sum to 1 for feature '" + features_[l].name + "'");
      }
    }
  }

  FeatureVar hypothesis_;
  std::vector<FeatureVar> features_;
  std::vector<double> prior_;
  std::vector<Cpt> cpts_;
};

/// Laplace-smoothed counts; the prior is forced uniform over classes.
inline BayesNet learn_cpts(const CategoricalDataset& data, double smoothing) {
  require(data.size() > 0, ErrorCode::EmptyDataset, "no records");
  require(smoothing >= 0.0, ErrorCode::InvalidArgument, "smoothing must be >= 0");
  require(data.labels.size() == data.rows.size(), ErrorCode::ArityMismatch, "label count != row count");
  const auto k = data.label.arity();
  const auto n = data.features.size();
  std::vector<std::vector<double>> counts(n);
  for (std::size_t l = 0; l < n; ++l) counts[l].assign(data.features[l].arity() * k, 0.0);
  std::vector<double> totals(k, 0.0);
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    const auto& row = data.rows[r];
    require(row.size() == n, ErrorCode::ArityMismatch, "record " + std::to_string(r) + " has wrong arity");
    const auto y = data.labels[r];
    require(y < k, ErrorCode::UnknownLabel, "label index out of range");
    totals[y] += 1.0;
    for (std::size_t l = 0; l < n; ++l) {
      require(row[l] < data.features[l].arity(), ErrorCode::ArityMismatch, "value index out of range");
      counts[l][row[l] * k + y] += 1.0;
    }
  }
  std::vector<Cpt> cpts;
  cpts.reserve(n);
  for (std::size_t l = 0; l < n; ++l) {
    const auto a = data.features[l].arity();
    std::vector<double> table(a * k);
    for (std::size_t y = 0; y < k; ++y) {
      const double denom = totals[y] + smoothing * static_cast<double>(a);
      require(denom > 0.0, ErrorCode::InvalidArgument,
              "class '" + data.label.values[y] + "' has no records and smoothing is 0");
      for (std::size_t x = 0; x < a; ++x) table[x * k + y] = (counts[l][x * k + y] + smoothing) / denom;
    }
    cpts.emplace_back(a, k, std::move(table));
  }
  std::vector<double> prior(k, 1.0 / static_cast<double>(k));
  return BayesNet(data.label, data.features, std::move(prior), std::move(cpts));
}

inline Posterior posterior(const BayesNet& net, const Evidence& ev) {
  std::vector<double> p = net.prior();
  for (std::size_t l = 0; l < net.feature_count(); ++l) {
    auto x = ev.value(l);
    if (!x) continue;
    require(*x < net.features()[l].arity(), ErrorCode::InvalidArgument, "evidence value out of range");
    for (std::size_t y = 0; y < p.size(); ++y) p[y] *= net.cpt(l)(*x, y);
  }
  const double z = std::accumulate(p.begin(), p.end(), 0.0);
  require(z > 0.0, ErrorCode::InvalidArgument, "evidence has zero probability");
  for (auto& v : p) v /= z;
  return Posterior{std::move(p)};
}

inline std::size_t map_class(const BayesNet& net, const Evidence& ev) {
  return posterior(net, ev).argmax();
}

inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

/// H(Y | X_S) by enumerating the joint of the subset.
inline double conditional_entropy(const BayesNet& net, std::span<const std::size_t> subset) {
  const auto k = net.classes();
  std::vector<std::size_t> digits(subset.size(), 0);
  std::vector<double> joint(k);
  double h = 0.0;
  while (true) {
    double mass = 0.0;
    for (std::size_t y = 0; y < k; ++y) {
      double v = net.prior()[y];
      for (std::size_t i = 0; i < subset.size(); ++i) v *= net.cpt(subset[i])(digits[i], y);
      joint[y] = v;
      mass += v;
    }
    if (mass > 0.0)
      for (double v : joint)
        if (v > 0.0) h -= v * std::log2(v / mass);
    std::size_t i = 0;
    for (; i < subset.size(); ++i) {
      if (++digits[i] < net.features()[subset[i]].arity()) break;
      digits[i] = 0;
    }
    if (i == subset.size()) break;
  }
  return h;
}

inline double mutual_information(const BayesNet& net, std::span<const std::size_t> subset) {
  if (subset.empty()) return 0.0;
  return entropy(net.prior()) - conditional_entropy(net, subset);
}

/// I(Y; X_1..X_m) for every m in [0, n], in one depth-first pass over the
/// reveal order.
inline std::vector<double> prefix_information(const BayesNet& net) {
  const auto n = net.feature_count();
  const auto k = net.classes();
  std::vector<double> cond(n + 1, 0.0);
  std::vector<std::vector<double>> weights(n + 1, std::vector<double>(k));
  weights[0] = net.prior();
  auto accumulate_level = [&](std::size_t depth) {
    const auto& w = weights[depth];
    const double mass = std::accumulate(w.begin(), w.end(), 0.0);
    if (mass <= 0.0) return;
    for (double v : w)
      if (v > 0.0) cond[depth] -= v * std::log2(v / mass);
  };
  auto visit = [&](auto&& self, std::size_t depth) -> void {
    accumulate_level(depth);
    if (depth == n) return;
    const auto& cpt = net.cpt(depth);
    for (std::size_t x = 0; x < cpt.arity(); ++x) {
      for (std::size_t y = 0; y < k; ++y) weights[depth + 1][y] = weights[depth][y] * cpt(x, y);
      self(self, depth + 1);
    }
  };
  visit(visit, 0);
  const double h = entropy(net.prior());
  std::vector<double> info(n + 1);
  for (std::size_t m = 0; m <= n; ++m) info[m] = m == 0 ? 0.0 : h - cond[m];
  return info;
}

inline double expected_info_first_m(const BayesNet& net, std::size_t m) {
  require(m <= net.feature_count(), ErrorCode::InvalidArgument, "m exceeds feature count");
  if (m == 0) return 0.0;
  std::vector<std::size_t> subset(m);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  return mutual_information(net, subset);
}

/// max_y P(y | x_l) - max_y P(y) for a single observed feature value.
inline double prob_gain(const BayesNet& net, std::size_t feature, std::size_t value) {
  Evidence ev(net.feature_count());
  ev.observe(feature, value);
  const double prior_max = *std::max_element(net.prior().begin(), net.prior().end());
  return posterior(net, ev).max() - prior_max;
}

/// ln p(x | y1) - ln p(x | y2), with both conditionals floored at 1e-9.
inline double log_odds(const BayesNet& net, std::size_t feature, std::size_t value) {
  require(net.classes() == 2, ErrorCode::NonBinaryHypothesis, "log odds need a binary hypothesis");
  const auto& cpt = net.cpt(feature);
  return std::log(std::max(cpt(value, 0), kLogOddsFloor)) - std::log(std::max(cpt(value, 1), kLogOddsFloor));
}

inline double prior_log_odds(const BayesNet& net) {
  require(net.classes() == 2, ErrorCode::NonBinaryHypothesis, "log odds need a binary hypothesis");
  return std::log(std::max(net.prior()[0], kLogOddsFloor)) - std::log(std::max(net.prior()[1], kLogOddsFloor));
}

namespace detail {
inline std::vector<double> random_simplex(Rng& rng, std::size_t size, double floor) {
  std::vector<double> v(size);
  double z = 0.0;
  for (auto& x : v) {
    x = floor + rng.uniform();
    z += x;
  }
  for (auto& x : v) x /= z;
  return v;
}
}  // namespace detail

struct RandomNetOptions {
  std::size_t features = 4;
  std::size_t classes = 2;
  std::size_t min_arity = 2;
  std::size_t max_arity = 3;
  bool uniform_prior = false;
  /// Added to every raw draw before normalising; larger means flatter tables.
  double floor = 0.05;
};

inline BayesNet random_net(Rng& rng, const RandomNetOptions& opt) {
  require(opt.classes >= 2 && opt.min_arity >= 2 && opt.max_arity >= opt.min_arity,
          ErrorCode::InvalidArgument, "bad random net options");
  FeatureVar hyp{"Y", {}};
  for (std::size_t y = 0; y < opt.classes; ++y) hyp.values.push_back("y" + std::to_string(y + 1));
  std::vector<FeatureVar> features;
  std::vector<Cpt> cpts;
  for (std::size_t l = 0; l < opt.features; ++l) {
    const auto arity = opt.min_arity + rng.index(opt.max_arity - opt.min_arity + 1);
    FeatureVar f{"X" + std::to_string(l + 1), {}};
    for (std::size_t x = 0; x < arity; ++x) f.values.push_back("v" + std::to_string(x));
    std::vector<double> table(arity * opt.classes);
    for (std::size_t y = 0; y < opt.classes; ++y) {
      auto col = detail::random_simplex(rng, arity, opt.floor);
      for (std::size_t x = 0; x < arity; ++x) table[x * opt.classes + y] = col[x];
    }
    features.push_back(std::move(f));
    cpts.emplace_back(arity, opt.classes, std::move(table));
  }
  std::vector<double> prior = opt.uniform_prior
                                  ? std::vector<double>(opt.classes, 1.0 / static_cast<double>(opt.classes))
                                  : detail::random_simplex(rng, opt.classes, opt.floor);
  return BayesNet(std::move(hyp), std::move(features), std::move(prior), std::move(cpts));
}

/// Draws (class, full feature vector) from the joint distribution.
inline std::pair<std::size_t, std::vector<std::size_t>> sample_instance(const BayesNet& net, Rng& rng) {
  auto draw = [&](auto&& prob, std::size_t count) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      acc += prob(i);
      if (u < acc) return i;
    }
    return count - 1;
  };
  const auto y = draw([&](std::size_t i) { return net.prior()[i]; }, net.classes());
  std::vector<std::size_t> xs(net.feature_count());
  for (std::size_t l = 0; l < xs.size(); ++l)
    xs[l] = draw([&](std::size_t x) { return net.cpt(l)(x, y); }, net.features()[l].arity());
  return {y, std::move(xs)};
}

}  // namespace hunt
