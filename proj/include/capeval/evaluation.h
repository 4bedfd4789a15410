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

#ifndef CAPEVAL_EVALUATION_H_
#define CAPEVAL_EVALUATION_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "capeval/corpus.h"
#include "capeval/slicer.h"

namespace capeval {

struct PredictionSet {
  std::string model_id;
  std::unordered_map<std::string, Label> predictions;  // example id -> label
};

// Parses line-delimited JSON records
//   {"model_id": "m0", "example_id": "r1", "label": "positive"}
// into one PredictionSet per model, in order of first appearance.
std::vector<PredictionSet> ParsePredictionsText(std::string_view text);

std::vector<PredictionSet> LoadPredictions(const std::filesystem::path& path);

// Serializes prediction sets; examples are emitted in `example_order`.
std::string WritePredictionRecords(const std::vector<PredictionSet>& sets,
                                   const std::vector<std::string>& example_order);

struct AccuracyCount {
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Throws ValidationError naming the first example without a prediction, or
// if `examples` is empty.
AccuracyCount CountCorrect(const PredictionSet& preds,
                           const std::vector<Example>& examples);

double Accuracy(const PredictionSet& preds,
                const std::vector<Example>& examples);

// 1 - Accuracy.
double FailureRate(const PredictionSet& preds,
                   const std::vector<Example>& examples);

inline constexpr std::string_view kSourceAccuracy = "source_accuracy";

// Models x features accuracy table plus per-target-domain accuracy vectors.
// Column 0 is source accuracy, followed by capability columns, followed by
// random-subset baseline columns named RandomSubsetColumn(seed, j) when
// present.
struct ScoreMatrix {
  std::vector<std::string> model_ids;
  std::vector<std::string> feature_names;
  Eigen::MatrixXd features;  // model_ids.size() x feature_names.size()
  std::vector<std::pair<std::string, Eigen::VectorXd>> targets;

  // Column index by name, or -1.
  int ColumnIndex(std::string_view name) const;
  Eigen::VectorXd Column(std::string_view name) const;

  std::vector<std::string> CapabilityNames() const;

  // Random-subset columns grouped by seed index, each group in subset order.
  std::vector<std::vector<std::string>> RandomSubsetGroups() const;
};

std::string RandomSubsetColumn(std::size_t seed_index, std::size_t subset);

// Throws ValidationError on shape mismatches or entries outside [0, 1].
void ValidateScoreMatrix(const ScoreMatrix& scores);

struct ScoreOptions {
  SplitMode split = SplitMode::kValidation;
  int jobs = 1;
};

// Source accuracy on the evaluation split, slice accuracy on each slice's
// members, and target accuracy over each whole target domain. A slice with no
// members is rejected with ValidationError.
ScoreMatrix BuildScoreMatrix(const std::vector<PredictionSet>& preds,
                             const Corpus& corpus,
                             const std::vector<Slice>& slices,
                             const ScoreOptions& options = {});

// Appends one column per (seed, subset) holding each model's accuracy on
// that pseudo-slice. `subsets[s][j]` lists example ids of subset j drawn
// with seed index s; ids resolve against `pool`.
void AddRandomSubsetColumns(
    ScoreMatrix& scores, const std::vector<PredictionSet>& preds,
    const std::vector<Example>& pool,
    const std::vector<std::vector<std::vector<std::string>>>& subsets,
    int jobs = 1);

// features.csv (model_id + feature columns) and targets.csv (model_id + one
// column per target domain). Values use shortest round-trip formatting.
void WriteScoreMatrix(const ScoreMatrix& scores,
                      const std::filesystem::path& dir);
ScoreMatrix ReadScoreMatrix(const std::filesystem::path& dir);

}  // namespace capeval

#endif  // CAPEVAL_EVALUATION_H_
