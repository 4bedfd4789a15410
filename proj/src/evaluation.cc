// Copyright 2026 The Capeval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "capeval/evaluation.h"

#include <cstdlib>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "capeval/errors.h"
#include "capeval/io.h"
#include "capeval/parallel.h"
#include "json.hpp"

namespace capeval {
namespace {

using json = nlohmann::json;

constexpr std::string_view kRandomPrefix = "random:";

double ParseNumber(const std::string& field, std::string_view where) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) {
    throw ValidationError(
        fmt::format("{}: '{}' is not a number", where, field));
  }
  return v;
}

std::string FormatNumber(double v) { return fmt::format("{}", v); }

}  // namespace

std::vector<PredictionSet> ParsePredictionsText(std::string_view text) {
  std::vector<PredictionSet> sets;
  std::unordered_map<std::string, std::size_t> index_of;
  std::size_t record = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    ++record;

    json r;
    try {
      r = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(
          fmt::format("prediction record {}: malformed JSON: {}", record,
                      e.what()));
    }
    for (const char* field : {"model_id", "example_id", "label"}) {
      if (!r.is_object() || !r.contains(field) || !r[field].is_string()) {
        throw ValidationError(fmt::format(
            "prediction record {}: missing or non-string field '{}'", record,
            field));
      }
    }
    const std::string model_id = r["model_id"].get<std::string>();
    const std::string example_id = r["example_id"].get<std::string>();
    Label label;
    try {
      label = ParseLabel(r["label"].get<std::string>());
    } catch (const ValidationError& e) {
      throw ValidationError(
          fmt::format("prediction record {}: {}", record, e.what()));
    }

    auto [it, inserted] = index_of.try_emplace(model_id, sets.size());
    if (inserted) sets.push_back(PredictionSet{model_id, {}});
    PredictionSet& set = sets[it->second];
    if (!set.predictions.emplace(example_id, label).second) {
      throw ValidationError(fmt::format(
          "prediction record {}: duplicate prediction for model '{}' on "
          "example '{}'",
          record, model_id, example_id));
    }
  }
  return sets;
}

std::vector<PredictionSet> LoadPredictions(const std::filesystem::path& path) {
  return ParsePredictionsText(ReadFile(path));
}

std::string WritePredictionRecords(
    const std::vector<PredictionSet>& sets,
    const std::vector<std::string>& example_order) {
  std::string out;
  for (const PredictionSet& set : sets) {
    for (const std::string& id : example_order) {
      auto it = set.predictions.find(id);
      if (it == set.predictions.end()) continue;
      json r = json::object();
      r["model_id"] = set.model_id;
      r["example_id"] = id;
      r["label"] = std::string(LabelName(it->second));
      out += r.dump();
      out.push_back('\n');
    }
  }
  return out;
}

AccuracyCount CountCorrect(const PredictionSet& preds,
                           const std::vector<Example>& examples) {
  if (examples.empty()) {
    throw ValidationError("accuracy is undefined on an empty example set");
  }
  AccuracyCount count;
  for (const Example& e : examples) {
    auto it = preds.predictions.find(e.id);
    if (it == preds.predictions.end()) {
      throw ValidationError(fmt::format("model '{}' has no prediction for '{}'",
                                        preds.model_id, e.id));
    }
    if (it->second == e.label) ++count.correct;
    ++count.total;
  }
  return count;
}

double Accuracy(const PredictionSet& preds,
                const std::vector<Example>& examples) {
  const AccuracyCount c = CountCorrect(preds, examples);
  return static_cast<double>(c.correct) / static_cast<double>(c.total);
}

double FailureRate(const PredictionSet& preds,
                   const std::vector<Example>& examples) {
  return 1.0 - Accuracy(preds, examples);
}

int ScoreMatrix::ColumnIndex(std::string_view name) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Eigen::VectorXd ScoreMatrix::Column(std::string_view name) const {
  const int i = ColumnIndex(name);
  if (i < 0) throw ValidationError(fmt::format("no score column '{}'", name));
  return features.col(i);
}

std::vector<std::string> ScoreMatrix::CapabilityNames() const {
  std::vector<std::string> out;
  for (const std::string& n : feature_names) {
    if (n == kSourceAccuracy) continue;
    if (n.rfind(kRandomPrefix, 0) == 0) continue;
    out.push_back(n);
  }
  return out;
}

std::vector<std::vector<std::string>> ScoreMatrix::RandomSubsetGroups() const {
  std::vector<std::vector<std::string>> groups;
  for (const std::string& n : feature_names) {
    if (n.rfind(kRandomPrefix, 0) != 0) continue;
    const std::string rest = n.substr(kRandomPrefix.size());
    const std::size_t colon = rest.find(':');
    const std::size_t seed = std::stoul(rest.substr(0, colon));
    if (groups.size() <= seed) groups.resize(seed + 1);
    groups[seed].push_back(n);
  }
  return groups;
}

std::string RandomSubsetColumn(std::size_t seed_index, std::size_t subset) {
  return fmt::format("{}{}:{}", kRandomPrefix, seed_index, subset);
}

void ValidateScoreMatrix(const ScoreMatrix& scores) {
  const auto m = static_cast<Eigen::Index>(scores.model_ids.size());
  if (scores.features.rows() != m ||
      scores.features.cols() !=
          static_cast<Eigen::Index>(scores.feature_names.size())) {
    throw ValidationError("score matrix shape does not match its labels");
  }
  std::set<std::string> names(scores.feature_names.begin(),
                              scores.feature_names.end());
  if (names.size() != scores.feature_names.size()) {
    throw ValidationError("score matrix has duplicate feature names");
  }
  if (scores.ColumnIndex(kSourceAccuracy) != 0) {
    throw ValidationError("score matrix column 0 must be source_accuracy");
  }
  auto in_unit = [](const auto& x) {
    return x.size() == 0 || (x.minCoeff() >= 0.0 && x.maxCoeff() <= 1.0);
  };
  if (!in_unit(scores.features)) {
    throw ValidationError("score matrix entries must lie in [0, 1]");
  }
  for (const auto& [domain, acc] : scores.targets) {
    if (acc.size() != m) {
      throw ValidationError(fmt::format(
          "target '{}' has {} entries for {} models", domain, acc.size(), m));
    }
    if (!in_unit(acc)) {
      throw ValidationError(
          fmt::format("target '{}' accuracies must lie in [0, 1]", domain));
    }
  }
}

ScoreMatrix BuildScoreMatrix(const std::vector<PredictionSet>& preds,
                             const Corpus& corpus,
                             const std::vector<Slice>& slices,
                             const ScoreOptions& options) {
  const std::vector<Example> eval_split =
      SourceEvaluationSplit(corpus, options.split);
  if (eval_split.empty()) {
    throw ValidationError(fmt::format(
        "source domain '{}' has no examples in the evaluation split",
        corpus.source_domain));
  }
  std::unordered_map<std::string, const Example*> by_id;
  for (const Example& e : eval_split) by_id.emplace(e.id, &e);

  std::vector<std::vector<Example>> slice_members;
  for (const Slice& s : slices) {
    if (s.member_ids.empty()) {
      throw ValidationError(fmt::format(
          "capability '{}' has an empty test suite; remove it or widen its "
          "keywords",
          s.capability_name));
    }
    std::vector<Example> members;
    for (const std::string& id : s.member_ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw ValidationError(fmt::format(
            "slice '{}' member '{}' is not in the source evaluation split",
            s.capability_name, id));
      }
      members.push_back(*it->second);
    }
    slice_members.push_back(std::move(members));
  }
  std::vector<std::vector<Example>> target_sets;
  for (const std::string& t : corpus.target_domains) {
    target_sets.push_back(corpus.Domain(t));
  }

  ScoreMatrix scores;
  const std::size_t m = preds.size();
  scores.feature_names.emplace_back(kSourceAccuracy);
  for (const Slice& s : slices) scores.feature_names.push_back(s.capability_name);
  scores.features.resize(static_cast<Eigen::Index>(m),
                         static_cast<Eigen::Index>(scores.feature_names.size()));
  for (const auto& t : corpus.target_domains) {
    scores.targets.emplace_back(t, Eigen::VectorXd(static_cast<Eigen::Index>(m)));
  }
  for (const PredictionSet& p : preds) scores.model_ids.push_back(p.model_id);

  ParallelFor(m, options.jobs, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    scores.features(row, 0) = Accuracy(preds[i], eval_split);
    for (std::size_t c = 0; c < slice_members.size(); ++c) {
      scores.features(row, static_cast<Eigen::Index>(c + 1)) =
          Accuracy(preds[i], slice_members[c]);
    }
    for (std::size_t t = 0; t < target_sets.size(); ++t) {
      scores.targets[t].second(row) = Accuracy(preds[i], target_sets[t]);
    }
  });
  return scores;
}

void AddRandomSubsetColumns(
    ScoreMatrix& scores, const std::vector<PredictionSet>& preds,
    const std::vector<Example>& pool,
    const std::vector<std::vector<std::vector<std::string>>>& subsets,
    int jobs) {
  if (preds.size() != scores.model_ids.size()) {
    throw ValidationError("prediction sets do not match score matrix rows");
  }
  std::unordered_map<std::string, const Example*> by_id;
  for (const Example& e : pool) by_id.emplace(e.id, &e);

  std::vector<std::vector<Example>> columns;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    for (std::size_t j = 0; j < subsets[s].size(); ++j) {
      std::vector<Example> members;
      for (const std::string& id : subsets[s][j]) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
          throw ValidationError(
              fmt::format("random subset member '{}' not in pool", id));
        }
        members.push_back(*it->second);
      }
      columns.push_back(std::move(members));
      scores.feature_names.push_back(RandomSubsetColumn(s, j));
    }
  }
  const Eigen::Index first = scores.features.cols();
  scores.features.conservativeResize(
      Eigen::NoChange, first + static_cast<Eigen::Index>(columns.size()));
  ParallelFor(preds.size(), jobs, [&](std::size_t i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      scores.features(static_cast<Eigen::Index>(i),
                      first + static_cast<Eigen::Index>(c)) =
          Accuracy(preds[i], columns[c]);
    }
  });
}

void WriteScoreMatrix(const ScoreMatrix& scores,
                      const std::filesystem::path& dir) {
  std::string features;
  std::vector<std::string> header{"model_id"};
  header.insert(header.end(), scores.feature_names.begin(),
                scores.feature_names.end());
  features += CsvRow(header);
  for (std::size_t i = 0; i < scores.model_ids.size(); ++i) {
    std::vector<std::string> row{scores.model_ids[i]};
    for (Eigen::Index c = 0; c < scores.features.cols(); ++c) {
      row.push_back(FormatNumber(scores.features(static_cast<Eigen::Index>(i), c)));
    }
    features += CsvRow(row);
  }

  std::string targets;
  header = {"model_id"};
  for (const auto& t : scores.targets) header.push_back(t.first);
  targets += CsvRow(header);
  for (std::size_t i = 0; i < scores.model_ids.size(); ++i) {
    std::vector<std::string> row{scores.model_ids[i]};
    for (const auto& t : scores.targets) {
      row.push_back(FormatNumber(t.second(static_cast<Eigen::Index>(i))));
    }
    targets += CsvRow(row);
  }
  WriteFileAtomic(dir / "features.csv", features);
  WriteFileAtomic(dir / "targets.csv", targets);
}

ScoreMatrix ReadScoreMatrix(const std::filesystem::path& dir) {
  const auto features = ParseCsv(ReadFile(dir / "features.csv"));
  const auto targets = ParseCsv(ReadFile(dir / "targets.csv"));
  if (features.empty() || targets.empty()) {
    throw ValidationError("score matrix files must have a header row");
  }
  ScoreMatrix scores;
  scores.feature_names.assign(features[0].begin() + 1, features[0].end());
  const std::size_t m = features.size() - 1;
  const std::size_t p = scores.feature_names.size();
  scores.features.resize(static_cast<Eigen::Index>(m),
                         static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = features[i + 1];
    if (row.size() != p + 1) {
      throw ValidationError(
          fmt::format("features.csv row {} has {} fields, expected {}", i + 2,
                      row.size(), p + 1));
    }
    scores.model_ids.push_back(row[0]);
    for (std::size_t c = 0; c < p; ++c) {
      scores.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          ParseNumber(row[c + 1], fmt::format("features.csv row {}", i + 2));
    }
  }

  if (targets.size() != m + 1) {
    throw ValidationError("targets.csv and features.csv row counts differ");
  }
  for (std::size_t t = 1; t < targets[0].size(); ++t) {
    scores.targets.emplace_back(targets[0][t],
                                Eigen::VectorXd(static_cast<Eigen::Index>(m)));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = targets[i + 1];
    if (row.size() != targets[0].size() || row[0] != scores.model_ids[i]) {
      throw ValidationError(
          fmt::format("targets.csv row {} does not line up with features.csv",
                      i + 2));
    }
    for (std::size_t t = 1; t < row.size(); ++t) {
      scores.targets[t - 1].second(static_cast<Eigen::Index>(i)) =
          ParseNumber(row[t], fmt::format("targets.csv row {}", i + 2));
    }
  }
  ValidateScoreMatrix(scores);
  return scores;
}

}  // namespace capeval
