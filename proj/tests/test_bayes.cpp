#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hunt/bayes.hpp"
#include "hunt/bayes_io.hpp"
#include "hunt/dataset.hpp"
#include "hunt/passive.hpp"
#include "hunt/passive_bench.hpp"
#include "oracles/bayes_oracle.hpp"
#include "support/expect_error.hpp"

using namespace hunt;

namespace {

BayesNet two_feature_net() {
  FeatureVar y{"Y", {"a", "b"}};
  std::vector<FeatureVar> f{{"X1", {"0", "1"}}, {"X2", {"0", "1"}}};
  std::vector<Cpt> cpts{Cpt(2, 2, {0.9, 0.2, 0.1, 0.8}), Cpt(2, 2, {0.6, 0.4, 0.4, 0.6})};
  return BayesNet(y, f, {0.5, 0.5}, cpts);
}

double t_for_gamma(double g, double lambda = 400.0) { return -lambda / std::log(g); }

RankedFeatures ranked(std::vector<double> values) {
  RankedFeatures r;
  for (std::size_t i = 0; i < values.size(); ++i) r.order.push_back(i);
  r.keys = values;
  for (auto& k : r.keys) k = std::abs(k);
  r.values = std::move(values);
  return r;
}

}  // namespace

TEST(BayesNet, RejectsBadShapes) {
  FeatureVar y{"Y", {"a", "b"}};
  std::vector<FeatureVar> f{{"X", {"0", "1"}}};
  EXPECT_HUNT_ERROR(BayesNet(y, f, {0.5, 0.4}, {Cpt(2, 2, {0.5, 0.5, 0.5, 0.5})}), ErrorCode::InvalidArgument);
  EXPECT_HUNT_ERROR(BayesNet(y, f, {0.5, 0.5}, {Cpt(2, 2, {0.5, 0.5, 0.6, 0.5})}), ErrorCode::InvalidArgument);
  EXPECT_HUNT_ERROR(BayesNet(y, f, {1.0}, {Cpt(2, 2, {0.5, 0.5, 0.5, 0.5})}), ErrorCode::ArityMismatch);
  EXPECT_HUNT_ERROR(Cpt(3, 2, {0.5, 0.5}), ErrorCode::ArityMismatch);
  EXPECT_HUNT_ERROR((FeatureVar{"X", {"dup", "dup"}}.validate()), ErrorCode::InvalidArgument);
}

TEST(BayesNet, PosteriorByHand) {
  const auto net = two_feature_net();
  Evidence ev(2);
  ev.observe(0, 0);
  const auto p = posterior(net, ev);
  EXPECT_NEAR(p.probs[0], 0.9 / 1.1, 1e-12);
  EXPECT_EQ(map_class(net, ev), 0u);
  EXPECT_NEAR(posterior(net, Evidence(2)).probs[0], 0.5, 1e-15);
}

TEST(BayesNet, MapTieGoesToLowerIndex) {
  FeatureVar y{"Y", {"a", "b"}};
  const BayesNet net(y, {{"X", {"0", "1"}}}, {0.5, 0.5}, {Cpt(2, 2, {0.5, 0.5, 0.5, 0.5})});
  Evidence ev(1);
  ev.observe(0, 1);
  EXPECT_EQ(map_class(net, ev), 0u);
}

TEST(BayesNet, InformationOfUninformativeFeatureIsZero) {
  FeatureVar y{"Y", {"a", "b"}};
  const BayesNet net(y, {{"X", {"0", "1"}}}, {0.3, 0.7}, {Cpt(2, 2, {0.4, 0.4, 0.6, 0.6})});
  EXPECT_NEAR(prefix_information(net)[1], 0.0, 1e-12);
}

TEST(BayesNet, PerfectFeatureCarriesPriorEntropy) {
  FeatureVar y{"Y", {"a", "b"}};
  const BayesNet net(y, {{"X", {"0", "1"}}}, {0.5, 0.5}, {Cpt(2, 2, {1.0, 0.0, 0.0, 1.0})});
  EXPECT_NEAR(expected_info_first_m(net, 1), 1.0, 1e-12);
}

TEST(BayesNetProperty, MatchesJointEnumeration) {
  Rng rng(11);
  for (int i = 0; i < 60; ++i) {
    RandomNetOptions o;
    o.features = 1 + rng.index(5);
    o.classes = 2 + rng.index(3);
    const auto net = random_net(rng, o);
    const auto joint = oracle::enumerate(net);
    const auto [y, xs] = sample_instance(net, rng);
    for (std::size_t m = 0; m <= xs.size(); ++m) {
      std::vector<std::optional<std::size_t>> ev(xs.size());
      for (std::size_t l = 0; l < m; ++l) ev[l] = xs[l];
      const auto want = oracle::posterior(joint, ev);
      const auto got = posterior(net, Evidence::prefix(xs, m));
      for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got.probs[k], want[k], 1e-12);
      EXPECT_NEAR(expected_info_first_m(net, m), oracle::prefix_information(joint, m), 1e-10);
    }
  }
}

TEST(BayesNetProperty, PrefixInformationIsMonotoneAndBounded) {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    RandomNetOptions o;
    o.features = 1 + rng.index(6);
    const auto net = random_net(rng, o);
    const auto info = prefix_information(net);
    EXPECT_EQ(info.front(), 0.0);
    for (std::size_t m = 1; m < info.size(); ++m) EXPECT_GE(info[m], info[m - 1] - 1e-12);
    EXPECT_LE(info.back(), entropy(net.prior()) + 1e-12);
  }
}

TEST(BayesIo, JsonRoundTrip) {
  const auto net = default_active_net();
  const auto back = bayes_net_from_json(to_json(net));
  EXPECT_EQ(to_json(back).dump(), to_json(net).dump());
  EXPECT_HUNT_ERROR(bayes_net_from_json(nlohmann::json{{"prior", {1.0}}}), ErrorCode::ParseError);
  EXPECT_HUNT_ERROR(load_bayes_net("/nonexistent/net.json"), ErrorCode::ParseError);
}

TEST(Dataset, LearnsSmoothedCptsWithUniformPrior) {
  std::istringstream in("a,b,class\nx,p,yes\nx,q,yes\ny,q,no\n");
  const auto data = read_categorical_csv(in);
  ASSERT_EQ(data.size(), 3u);
  const auto net = learn_cpts(data, 1.0);
  EXPECT_DOUBLE_EQ(net.prior()[0], 0.5);
  // P(a=x | yes) = (2 + 1) / (2 + 2)
  EXPECT_DOUBLE_EQ(net.cpt(0)(0, 0), 0.75);
  EXPECT_HUNT_ERROR(learn_cpts(CategoricalDataset{}, 1.0), ErrorCode::EmptyDataset);
}

TEST(Dataset, CarIngestSplitsAndRejectsBadRows) {
  const auto split = ingest_car_eval_file(std::string(HUNT_DATA_DIR) + "/car_evaluation.csv", 0);
  EXPECT_EQ(split.train.size(), 1228u);
  EXPECT_EQ(split.test.size(), 500u);
  EXPECT_EQ(split.train.features.size(), kCarFeatureCount);
  std::istringstream bad("buying,maint,doors,persons,lug_boot,safety,class\nvhigh,vhigh,2,2,small\n");
  EXPECT_HUNT_ERROR(ingest_car_eval(bad, 0), ErrorCode::MalformedRow);
  EXPECT_HUNT_ERROR(car_binary_label("meh", CarMerge::GoodUp), ErrorCode::UnknownLabel);
  EXPECT_EQ(car_binary_label("acc", CarMerge::AccUp), 0u);
  EXPECT_EQ(car_binary_label("acc", CarMerge::GoodUp), 1u);
}

TEST(Dataset, SplitIsSeedDeterministic) {
  const auto path = std::string(HUNT_DATA_DIR) + "/car_evaluation.csv";
  const auto a = ingest_car_eval_file(path, 5), b = ingest_car_eval_file(path, 5), c = ingest_car_eval_file(path, 6);
  EXPECT_EQ(a.test.rows, b.test.rows);
  EXPECT_NE(a.test.rows, c.test.rows);
}

// ---------------------------------------------------------------- heuristics

TEST(Gamma, Examples) {
  EXPECT_NEAR(gamma(400.0 / std::log(2.0), 400.0), 0.5, 1e-15);
  EXPECT_GT(gamma(1e12 * 400.0, 400.0), 1.0 - 1e-9);
  EXPECT_NEAR(gamma(750.0, 400.0), std::exp(-8.0 / 15.0), 1e-15);
  EXPECT_NEAR(gamma(750.0, 400.0), 0.5866, 1e-4);
  EXPECT_HUNT_ERROR(gamma(0.0, 400.0), ErrorCode::InvalidArgument);
}

TEST(Heuristics, ProbGainExamples) {
  TimePressureConfig tp;
  tp.decision_time_ms = t_for_gamma(0.9);
  EXPECT_EQ(h_probgain(tp, ranked({0.3, 0.2, 0.1})), 3u);
  EXPECT_EQ(h_probgain(tp, ranked({0.7})), 1u);
  // p = 4 with t_T just under the single-feature bound for ProbGain.
  tp.decision_time_ms = 400.0 / std::log(4.0) * (1 - 1e-9);
  EXPECT_EQ(h_probgain(tp, ranked({0.4, 0.39, 0.38, 0.37})), 1u);
  EXPECT_HUNT_ERROR(h_probgain(tp, ranked({0.3, -0.1})), ErrorCode::InvalidArgument);
}

TEST(Heuristics, LogOddsExamples) {
  TimePressureConfig tp;
  tp.decision_time_ms = t_for_gamma(0.95);
  EXPECT_EQ(h_logodds(tp, 0.0, ranked({1.3})), 1u);
  // Prefix enumeration: 0.95*1.2, 0.9025*0.4, 0.857375*0.9.
  EXPECT_EQ(h_logodds(tp, 0.2, ranked({1.0, -0.8, 0.5})), 1u);
  tp.decision_time_ms = t_for_gamma(0.999);
  EXPECT_EQ(h_logodds(tp, 0.2, ranked({1.0, 0.8, 0.5})), 3u);
}

TEST(Heuristics, LogOddsNeedNotConvergeToAllFeatures) {
  // Opposing evidence cancels, so one feature beats two for every gamma < 1.
  const auto r = ranked({1.0, -0.9});
  TimePressureConfig tp;
  for (double t : {1e3, 1e6, 1e9, 1e12}) {
    tp.decision_time_ms = t;
    EXPECT_EQ(h_logodds(tp, 0.0, r), 1u);
  }
}

TEST(Heuristics, InfoFreeExamples) {
  TimePressureConfig tp;
  tp.decision_time_ms = t_for_gamma(0.5);
  EXPECT_EQ(h_infofree(tp, 4), 2u);
  tp.decision_time_ms = t_for_gamma(0.8);
  EXPECT_EQ(h_infofree(tp, 4), 4u);
  tp.decision_time_ms = 500.0;
  EXPECT_EQ(h_infofree(tp, 6), 3u);
  EXPECT_HUNT_ERROR(h_infofree(tp, 0), ErrorCode::InvalidArgument);
}

TEST(Heuristics, RankingTiesKeepFeatureOrder) {
  FeatureVar y{"Y", {"a", "b"}};
  std::vector<FeatureVar> f(3, FeatureVar{"X", {"0", "1"}});
  std::vector<Cpt> cpts(3, Cpt(2, 2, {0.7, 0.3, 0.3, 0.7}));
  const BayesNet net(y, f, {0.5, 0.5}, cpts);
  const std::vector<std::size_t> obs{0, 0, 0};
  EXPECT_EQ(rank_by_prob_gain(net, obs).order, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(rank_by_abs_log_odds(net, obs).order, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(HeuristicsProperty, RankingMatchesPairwiseResort) {
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    RandomNetOptions o;
    o.features = 2 + rng.index(7);
    const auto net = random_net(rng, o);
    const auto [y, obs] = sample_instance(net, rng);
    const auto r = rank_by_abs_log_odds(net, obs);
    // Independent: selection sort by (|v| desc, index asc).
    std::vector<std::size_t> want;
    std::vector<bool> taken(obs.size(), false);
    for (std::size_t k = 0; k < obs.size(); ++k) {
      std::size_t best = obs.size();
      for (std::size_t l = 0; l < obs.size(); ++l) {
        if (taken[l]) continue;
        if (best == obs.size() || std::abs(log_odds(net, l, obs[l])) > std::abs(log_odds(net, best, obs[best]))) best = l;
      }
      taken[best] = true;
      want.push_back(best);
    }
    EXPECT_EQ(r.order, want);
  }
}

TEST(HeuristicsProperty, DecisionEqualsMapOnSelectedPrefix) {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    RandomNetOptions o;
    o.features = 2 + rng.index(6);
    const auto net = random_net(rng, o);
    const auto joint = oracle::enumerate(net);
    const auto [y, obs] = sample_instance(net, rng);
    TimePressureConfig tp;
    tp.decision_time_ms = rng.uniform(100.0, 4000.0);
    for (auto h : {HeuristicId::ProbGain, HeuristicId::LogOdds, HeuristicId::InfoFree, HeuristicId::BayesAll}) {
      const auto d = classify_under_pressure(net, obs, tp, h);
      ASSERT_EQ(d.selected.size(), d.used_features);
      std::vector<std::optional<std::size_t>> ev(obs.size());
      for (auto l : d.selected) ev[l] = obs[l];
      const auto p = oracle::posterior(joint, ev);
      EXPECT_NEAR(posterior(net, Evidence::from_subset(obs, d.selected)).max(), *std::max_element(p.begin(), p.end()),
                  1e-12);
      if (h == HeuristicId::BayesAll) {
        EXPECT_EQ(d.used_features, obs.size());
      }
    }
  }
}

TEST(HeuristicsProperty, MorePressureNeverUsesMoreFeatures) {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    RandomNetOptions o;
    o.features = 2 + rng.index(7);
    const auto net = random_net(rng, o);
    const auto [y, obs] = sample_instance(net, rng);
    TimePressureConfig relaxed, intense;
    relaxed.decision_time_ms = rng.uniform(500.0, 5000.0);
    intense.decision_time_ms = relaxed.decision_time_ms * 0.5;
    for (auto h : {HeuristicId::ProbGain, HeuristicId::LogOdds, HeuristicId::InfoFree})
      EXPECT_LE(classify_under_pressure(net, obs, intense, h).used_features,
                classify_under_pressure(net, obs, relaxed, h).used_features);
  }
}

TEST(HeuristicsProperty, WorkStaysNearLinearithmic) {
  Rng rng(24);
  for (std::size_t p : {2, 4, 8, 16, 32}) {
    RandomNetOptions o;
    o.features = p;
    const auto net = random_net(rng, o);
    const auto [y, obs] = sample_instance(net, rng);
    WorkCounter w;
    (void)classify_under_pressure(net, obs, TimePressureConfig{}, HeuristicId::LogOdds, &w);
    const double pp = static_cast<double>(p);
    EXPECT_LE(static_cast<double>(w.total()), 4.0 * (pp * std::log2(pp) + pp));
    EXPECT_EQ(w.key_evaluations, p);
    EXPECT_EQ(w.scan_steps, p);
  }
}

TEST(PassiveBench, ReportShapeAndDeterminism) {
  const auto split = ingest_car_eval_file(std::string(HUNT_DATA_DIR) + "/car_evaluation.csv", 0);
  const auto net = learn_cpts(split.train, 1.0);
  const auto a = run_passive_bench(split.test, net, {});
  const auto b = run_passive_bench(split.test, net, {});
  EXPECT_EQ(a.rows.size(), 12u);
  EXPECT_EQ(passive_report_csv(a), passive_report_csv(b));
  for (const auto& r : a.rows) {
    EXPECT_GE(r.mean_features, 1.0);
    EXPECT_LE(r.mean_features, 6.0);
    EXPECT_NEAR(r.efficiency, r.accuracy / r.mean_features, 1e-12);
  }
  EXPECT_HUNT_ERROR(run_passive_bench(CategoricalDataset{}, net, {}), ErrorCode::EmptyDataset);
}
