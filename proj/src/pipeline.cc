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

#include "capeval/pipeline.h"

#include <exception>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "capeval/errors.h"
#include "capeval/io.h"

namespace capeval {
namespace {

void AttachImprovement(Report& report, const AnalysisResult& analysis) {
  if (report.distances.empty()) return;
  if (report.distances.size() < 2) {
    report.notices.push_back(
        "improvement-vs-distance slope omitted: fewer than two target domains");
    return;
  }
  try {
    report.improvement = ImprovementVsDistance(report.distances, analysis);
  } catch (const NumericalError& e) {
    report.notices.push_back(
        fmt::format("improvement-vs-distance slope omitted: {}", e.what()));
  }
}

}  // namespace

std::vector<Slice> NonEmptySlices(const std::vector<Slice>& slices,
                                  std::vector<std::string>* notices) {
  std::vector<Slice> kept;
  for (const Slice& s : slices) {
    if (!s.member_ids.empty()) {
      kept.push_back(s);
      continue;
    }
    const std::string msg = fmt::format(
        "capability '{}' matched no source examples; left out of the analysis",
        s.capability_name);
    spdlog::warn("{}", msg);
    if (notices != nullptr) notices->push_back(msg);
  }
  return kept;
}

std::vector<Slice> SliceSource(const Catalog& catalog, const Corpus& corpus,
                               SplitMode split, int jobs) {
  return Instantiate(catalog, SourceEvaluationSplit(corpus, split), jobs);
}

ScoreMatrix ScoreWithBaselines(const std::vector<PredictionSet>& preds,
                               const Corpus& corpus,
                               const std::vector<Slice>& slices,
                               const AnalysisConfig& config, SplitMode split,
                               bool random_subsets,
                               std::vector<std::string>* notices) {
  const std::vector<Slice> usable = NonEmptySlices(slices, notices);
  ScoreMatrix scores =
      BuildScoreMatrix(preds, corpus, usable, {split, config.jobs});
  if (!random_subsets || config.seed_count == 0) return scores;

  const CollinearityResult retained = ResolveRetainedCapabilities(scores, config);
  std::unordered_map<std::string, std::size_t> sizes_by_name;
  for (const Slice& s : usable) {
    sizes_by_name.emplace(s.capability_name, s.member_ids.size());
  }
  std::vector<std::size_t> sizes;
  for (const std::string& name : retained.retained) {
    sizes.push_back(sizes_by_name.at(name));
  }
  if (sizes.empty()) return scores;
  const std::vector<Example> pool = SourceEvaluationSplit(corpus, split);
  AddRandomSubsetColumns(
      scores, preds, pool,
      RandomSubsetBaseline(pool, sizes, RandomSubsetSeeds(config)), config.jobs);
  return scores;
}

PipelineOutput RunPipeline(const Catalog& catalog, const Corpus& corpus,
                           const std::vector<PredictionSet>& preds,
                           const PipelineOptions& options) {
  PipelineOutput out;
  const AnalysisConfig& config = options.analysis;
  out.slices = SliceSource(catalog, corpus, options.split, config.jobs);
  std::vector<std::string> notices;
  out.scores = ScoreWithBaselines(preds, corpus, out.slices, config,
                                  options.split, options.random_subsets,
                                  &notices);
  const AnalysisResult analysis = RunAnalysis(out.scores, config);

  std::vector<DomainDistance> distances;
  if (options.distances) {
    distances = ComputeDomainDistances(corpus, config.seed, options.classifier,
                                       config.jobs);
  }
  out.report = AnalysisReport(analysis, distances, config.seed,
                              options.config_text);
  out.report.split = options.split == SplitMode::kAll ? "all" : "validation";
  out.report.slices = SummarizeSlices(out.slices);
  out.report.notices.insert(out.report.notices.begin(), notices.begin(),
                            notices.end());
  return out;
}

Report AnalysisReport(const AnalysisResult& analysis,
                      const std::vector<DomainDistance>& distances,
                      uint64_t seed, const std::string& config_text) {
  Report report;
  report.config_hash = ConfigHash(config_text);
  report.analysis_seed = seed;
  if (!distances.empty()) report.split_seed = seed;
  report.analysis = analysis;
  report.distances = distances;
  AttachImprovement(report, analysis);
  return report;
}

std::vector<DomainDistance> ParseDistancesCsv(std::string_view text) {
  const auto rows = ParseCsv(text);
  if (rows.empty() ||
      rows[0] != std::vector<std::string>{"source", "target", "classifier_error",
                                          "proxy_a_distance"}) {
    throw ValidationError("distances file must start with the header "
                          "source,target,classifier_error,proxy_a_distance");
  }
  std::vector<DomainDistance> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) {
      throw ValidationError(fmt::format("distances row {} has {} fields", i, r.size()));
    }
    try {
      out.push_back({r[0], r[1], std::stod(r[2]), std::stod(r[3])});
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("distances row {} is not numeric", i));
    }
  }
  return out;
}

}  // namespace capeval
