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

#ifndef CAPEVAL_PIPELINE_H_
#define CAPEVAL_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "capeval/analysis.h"
#include "capeval/catalog.h"
#include "capeval/corpus.h"
#include "capeval/distance.h"
#include "capeval/evaluation.h"
#include "capeval/report.h"
#include "capeval/slicer.h"

namespace capeval {

// Slices the source evaluation split selected by `split`.
std::vector<Slice> SliceSource(const Catalog& catalog, const Corpus& corpus,
                               SplitMode split, int jobs);

// Drops slices with no members, logging a warning and appending a notice
// for each.
std::vector<Slice> NonEmptySlices(const std::vector<Slice>& slices,
                                  std::vector<std::string>* notices = nullptr);

// Score matrix plus the random-subset baseline columns. The subsets mirror
// the sizes of the slices that the analysis will retain. Empty slices are
// left out (see NonEmptySlices).
ScoreMatrix ScoreWithBaselines(const std::vector<PredictionSet>& preds,
                               const Corpus& corpus,
                               const std::vector<Slice>& slices,
                               const AnalysisConfig& config, SplitMode split,
                               bool random_subsets = true,
                               std::vector<std::string>* notices = nullptr);

struct PipelineOptions {
  AnalysisConfig analysis;
  SplitMode split = SplitMode::kValidation;
  bool random_subsets = true;
  bool distances = true;
  ClassifierOptions classifier;
  std::string config_text;  // canonical text hashed into the report
};

struct PipelineOutput {
  std::vector<Slice> slices;
  ScoreMatrix scores;
  Report report;
};

// Slice, score, analyze and (optionally) measure domain distance. With fewer
// than two target domains the improvement fit is skipped with a notice.
PipelineOutput RunPipeline(const Catalog& catalog, const Corpus& corpus,
                           const std::vector<PredictionSet>& preds,
                           const PipelineOptions& options);

// Report for an analysis over precomputed scores, optionally joined with
// distances from an earlier `distance` run.
Report AnalysisReport(const AnalysisResult& analysis,
                      const std::vector<DomainDistance>& distances,
                      uint64_t seed, const std::string& config_text);

// Reads the distances.csv written by the report renderer.
std::vector<DomainDistance> ParseDistancesCsv(std::string_view text);

}  // namespace capeval

#endif  // CAPEVAL_PIPELINE_H_
