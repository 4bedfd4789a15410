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

#ifndef CAPEVAL_REPORT_H_
#define CAPEVAL_REPORT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capeval/analysis.h"
#include "capeval/distance.h"
#include "capeval/slicer.h"

namespace capeval {

struct SliceSummary {
  std::string capability;
  std::size_t members = 0;
  std::size_t total = 0;
  double coverage = 0.0;
};

std::vector<SliceSummary> SummarizeSlices(const std::vector<Slice>& slices);

// Everything a report shows. The renderers below only format these values.
struct Report {
  std::string config_hash;
  uint64_t analysis_seed = 0;
  std::optional<uint64_t> split_seed;
  std::string split;  // "validation" or "all"
  std::vector<SliceSummary> slices;
  std::optional<AnalysisResult> analysis;
  std::vector<DomainDistance> distances;
  std::optional<ImprovementFit> improvement;
  std::vector<std::string> notices;
};

// 16 hex digits of FNV-1a over `text`.
std::string ConfigHash(std::string_view text);

std::string SerializeReport(const Report& report);
Report ParseReport(std::string_view json_text);

std::string RenderSliceTable(const std::vector<SliceSummary>& slices);
std::string RenderMarkdown(const Report& report);

// File name -> CSV content: capabilities.csv, analysis.csv,
// comparison.csv, distances.csv, improvement_scatter.csv,
// improvement_fit.csv (each only when its data is present).
std::map<std::string, std::string> RenderCsv(const Report& report);

// Writes results.json, report.md and the CSV files into `dir`.
void WriteReport(const Report& report, const std::filesystem::path& dir);

}  // namespace capeval

#endif  // CAPEVAL_REPORT_H_
