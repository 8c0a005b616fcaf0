#pragma once

// Header-bearing CSV ingestion for categorical datasets and the
// car-evaluation loader with its binary relabelling and seeded split.

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hunt/bayes.hpp"
#include "hunt/error.hpp"
#include "hunt/rng.hpp"

namespace hunt {

namespace detail {
inline std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::size_t intern(FeatureVar& var, const std::string& value) {
  if (auto idx = var.index_of(value)) return *idx;
  var.values.push_back(value);
  return var.values.size() - 1;
}
}  // namespace detail

/// Reads a CSV whose last column is the class label. Value lists are in
/// order of first appearance.
inline CategoricalDataset read_categorical_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::EmptyDataset, "missing header");
  auto header = detail::split_csv_line(line);
  require(header.size() >= 2, ErrorCode::MalformedRow, "header needs at least one feature and a label");
  CategoricalDataset data;
  data.label.name = header.back();
  for (std::size_t i = 0; i + 1 < header.size(); ++i) data.features.push_back(FeatureVar{header[i], {}});
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_csv_line(line);
    require(fields.size() == header.size(), ErrorCode::MalformedRow,
            "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) + " fields, expected " +
                std::to_string(header.size()));
    std::vector<std::size_t> row(data.features.size());
    for (std::size_t l = 0; l < row.size(); ++l) row[l] = detail::intern(data.features[l], fields[l]);
    data.rows.push_back(std::move(row));
    data.labels.push_back(detail::intern(data.label, fields.back()));
  }
  require(data.size() > 0, ErrorCode::EmptyDataset, "no records");
  return data;
}

/// How the four acceptability classes collapse onto {y1, y2}.
enum class CarMerge {
  GoodUp,  // {good, vgood} -> y1; {unacc, acc} -> y2
  AccUp,   // {acc, good, vgood} -> y1; {unacc} -> y2
};

inline CarMerge parse_car_merge(std::string_view s) {
  if (s == "good-up") return CarMerge::GoodUp;
  if (s == "acc-up") return CarMerge::AccUp;
  fail(ErrorCode::InvalidArgument, "unknown merge '" + std::string(s) + "' (good-up|acc-up)");
}

/// Binary class for a car-evaluation label. `unacc_or_acc` marks rows of the
/// bundled file whose source does not separate unacc from acc.
inline std::size_t car_binary_label(std::string_view label, CarMerge merge) {
  if (label == "good" || label == "vgood") return 0;
  if (label == "unacc") return 1;
  if (label == "acc") return merge == CarMerge::GoodUp ? 1 : 0;
  if (label == "unacc_or_acc") {
    require(merge == CarMerge::GoodUp, ErrorCode::UnknownLabel,
            "label 'unacc_or_acc' is ambiguous under the acc-up merge");
    return 1;
  }
  fail(ErrorCode::UnknownLabel, "unknown car label '" + std::string(label) + "'");
}

struct TrainTestSplit {
  CategoricalDataset train;
  CategoricalDataset test;
};

inline constexpr std::size_t kCarFeatureCount = 6;
inline constexpr std::size_t kCarTestSize = 500;

/// Seeded Fisher-Yates split; the feature schema is shared by both halves.
inline TrainTestSplit split_dataset(const CategoricalDataset& data, std::size_t test_size, std::uint64_t seed) {
  require(test_size < data.size(), ErrorCode::InvalidArgument, "test split larger than dataset");
  std::vector<std::size_t> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(derive_seed(seed, "split"));
  for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng.index(i + 1)]);
  TrainTestSplit out;
  for (auto* part : {&out.train, &out.test}) {
    part->label = data.label;
    part->features = data.features;
  }
  const auto train_size = data.size() - test_size;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto& part = i < train_size ? out.train : out.test;
    part.rows.push_back(data.rows[idx[i]]);
    part.labels.push_back(data.labels[idx[i]]);
  }
  return out;
}

/// Six categorical features plus one of the acceptability labels per row,
/// relabelled to a binary hypothesis and split train/test (1228/500 for the
/// full 1728-row file).
inline TrainTestSplit ingest_car_eval(std::istream& in, std::uint64_t seed, CarMerge merge = CarMerge::GoodUp) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::EmptyDataset, "missing header");
  auto header = detail::split_csv_line(line);
  require(header.size() == kCarFeatureCount + 1, ErrorCode::MalformedRow,
          "car header needs 6 features and a class column");
  CategoricalDataset data;
  data.label = FeatureVar{"class", merge == CarMerge::GoodUp ? std::vector<std::string>{"good_or_better", "below_good"}
                                                             : std::vector<std::string>{"acc_or_better", "unacc"}};
  for (std::size_t i = 0; i < kCarFeatureCount; ++i) data.features.push_back(FeatureVar{header[i], {}});
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_csv_line(line);
    require(fields.size() == kCarFeatureCount + 1, ErrorCode::MalformedRow,
            "line " + std::to_string(line_no) + ": expected 7 fields, got " + std::to_string(fields.size()));
    std::vector<std::size_t> row(kCarFeatureCount);
    for (std::size_t l = 0; l < kCarFeatureCount; ++l) row[l] = detail::intern(data.features[l], fields[l]);
    data.labels.push_back(car_binary_label(fields.back(), merge));
    data.rows.push_back(std::move(row));
  }
  require(data.size() > kCarTestSize, ErrorCode::EmptyDataset, "car data has too few rows for the test split");
  return split_dataset(data, kCarTestSize, seed);
}

inline TrainTestSplit ingest_car_eval_file(const std::string& path, std::uint64_t seed,
                                           CarMerge merge = CarMerge::GoodUp) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::ParseError, "cannot open " + path);
  return ingest_car_eval(in, seed, merge);
}

}  // namespace hunt
