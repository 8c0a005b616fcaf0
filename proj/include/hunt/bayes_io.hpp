#pragma once

// JSON document form of a BayesNet:
//   {"hypothesis": {"name": "Y", "values": ["y1", "y2"]},
//    "features":   [{"name": "X1", "values": ["a", "b"]}, ...],   // reveal order
//    "prior":      [0.5, 0.5],
//    "cpts":       [[[P(a|y1), P(a|y2)], [P(b|y1), P(b|y2)]], ...]}
// Each CPT is row-major by feature value, one column per class.

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hunt/bayes.hpp"

namespace hunt {

inline nlohmann::json to_json(const FeatureVar& v) { return {{"name", v.name}, {"values", v.values}}; }

inline nlohmann::json to_json(const BayesNet& net) {
  nlohmann::json features = nlohmann::json::array();
  nlohmann::json cpts = nlohmann::json::array();
  for (std::size_t l = 0; l < net.feature_count(); ++l) {
    features.push_back(to_json(net.features()[l]));
    nlohmann::json rows = nlohmann::json::array();
    const auto& c = net.cpt(l);
    for (std::size_t x = 0; x < c.arity(); ++x) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t y = 0; y < c.classes(); ++y) row.push_back(c(x, y));
      rows.push_back(std::move(row));
    }
    cpts.push_back(std::move(rows));
  }
  return {{"hypothesis", to_json(net.hypothesis())},
          {"features", std::move(features)},
          {"prior", net.prior()},
          {"cpts", std::move(cpts)}};
}

inline FeatureVar feature_var_from_json(const nlohmann::json& j) {
  return FeatureVar{j.at("name").get<std::string>(), j.at("values").get<std::vector<std::string>>()};
}

inline BayesNet bayes_net_from_json(const nlohmann::json& j) {
  try {
    auto hyp = feature_var_from_json(j.at("hypothesis"));
    std::vector<FeatureVar> features;
    for (const auto& f : j.at("features")) features.push_back(feature_var_from_json(f));
    auto prior = j.at("prior").get<std::vector<double>>();
    const auto& jc = j.at("cpts");
    require(jc.size() == features.size(), ErrorCode::ArityMismatch, "one CPT per feature required");
    std::vector<Cpt> cpts;
    for (std::size_t l = 0; l < features.size(); ++l) {
      std::vector<double> table;
      for (const auto& row : jc[l]) {
        require(row.size() == hyp.arity(), ErrorCode::ArityMismatch, "CPT row width != class count");
        for (const auto& v : row) table.push_back(v.get<double>());
      }
      cpts.emplace_back(features[l].arity(), hyp.arity(), std::move(table));
    }
    return BayesNet(std::move(hyp), std::move(features), std::move(prior), std::move(cpts));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("bayes net json: ") + e.what());
  }
}

inline BayesNet load_bayes_net(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::ParseError, "cannot open " + path);
  try {
    return bayes_net_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

/// Built-in active-task model: binary hypothesis, four features revealed in
/// decreasing order of informativeness. Shipped as data/nets/active_default.json.
inline BayesNet default_active_net() {
  static const char* kJson = R"({
    "hypothesis": {"name": "treasure", "values": ["treasure", "clutter"]},
    "features": [
      {"name": "shape",   "values": ["round", "square", "irregular"]},
      {"name": "color",   "values": ["gold", "grey", "dark"]},
      {"name": "texture", "values": ["smooth", "rough"]},
      {"name": "size",    "values": ["small", "large"]}
    ],
    "prior": [0.5, 0.5],
    "cpts": [
      [[0.70, 0.10], [0.20, 0.30], [0.10, 0.60]],
      [[0.55, 0.20], [0.30, 0.35], [0.15, 0.45]],
      [[0.65, 0.40], [0.35, 0.60]],
      [[0.45, 0.55], [0.55, 0.45]]
    ]
  })";
  return bayes_net_from_json(nlohmann::json::parse(kJson));
}

}  // namespace hunt
