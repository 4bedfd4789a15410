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

#include "capeval/report.h"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "capeval/errors.h"
#include "capeval/pipeline.h"
#include "test_support.h"

namespace capeval {
namespace {

bool Contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

DomainAnalysis MakeDomain(const std::string& name, double base, double cap, double p) {
  DomainAnalysis d;
  d.domain = name;
  d.baseline_adjusted_r2 = base;
  d.capability_adjusted_r2 = cap;
  d.capability_test = {12.5, 3, 96, p, false};
  d.significant = p < 0.05;
  d.random_subset = BaselineStats{base + 0.01, 1.1, 0.4, 0.06, 100};
  d.noise = {base - 0.005, 0.3, 0.6, 0.04, 100};
  return d;
}

Report SampleReport() {
  Report r;
  r.config_hash = ConfigHash("alpha: 0.05\n");
  r.analysis_seed = 4;
  r.split_seed = 9;
  r.split = "validation";
  r.slices = {{"negation", 120, 1000, 0.12}, {"modality", 0, 1000, 0.0}};
  AnalysisResult a;
  a.noise_sigma = 0.031;
  a.noise_seed_count = a.random_seed_count = 100;
  a.model_count = 100;
  a.retained = {"negation", "modality", "amplifier"};
  a.dropped = {"negation_v2"};
  a.domains = {MakeDomain("books", 0.40, 0.55, 1e-9), MakeDomain("music", 0.30, 0.31, 0.4)};
  r.analysis = a;
  r.distances = {{"home", "books", 0.3, 0.8}, {"home", "music", 0.1, 1.6}};
  r.improvement = ImprovementVsDistance(r.distances, a);
  r.notices = {"something to note"};
  return r;
}

TEST(ConfigHashTest, StableAndSensitive) {
  EXPECT_EQ(ConfigHash(""), "cbf29ce484222325");  // FNV-1a offset basis
  EXPECT_EQ(ConfigHash("a"), "af63dc4c8601ec8c");
  EXPECT_NE(ConfigHash("alpha: 0.05"), ConfigHash("alpha: 0.01"));
}

TEST(SummarizeSlicesTest, CopiesCounts) {
  const auto s = SummarizeSlices({Slice{"neg", {"a", "b"}, 8}});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].members, 2u);
  EXPECT_EQ(s[0].total, 8u);
  EXPECT_EQ(s[0].coverage, 0.25);
}

TEST(SerializeReportTest, RoundTrip) {
  const Report r = SampleReport();
  const std::string json = SerializeReport(r);
  const Report back = ParseReport(json);
  EXPECT_EQ(SerializeReport(back), json);
  EXPECT_EQ(back.config_hash, r.config_hash);
  ASSERT_TRUE(back.analysis.has_value());
  EXPECT_EQ(back.analysis->domains[1].capability_test.p_value, 0.4);
  EXPECT_EQ(back.analysis->retained, r.analysis->retained);
  ASSERT_TRUE(back.improvement.has_value());
  EXPECT_EQ(back.improvement->slope, r.improvement->slope);
}

TEST(SerializeReportTest, InfiniteStatisticIsNull) {
  Report r = SampleReport();
  r.analysis->domains[0].capability_test.f_statistic =
      std::numeric_limits<double>::infinity();
  r.analysis->domains[0].capability_test.perfect_fit = true;
  const std::string json = SerializeReport(r);
  EXPECT_TRUE(Contains(json, "\"f_statistic\": null"));
  const Report back = ParseReport(json);
  EXPECT_TRUE(std::isinf(back.analysis->domains[0].capability_test.f_statistic));
}

TEST(SerializeReportTest, MalformedJsonIsValidationError) {
  EXPECT_THROW(ParseReport("{not json"), ValidationError);
  EXPECT_THROW(ParseReport("[]"), ValidationError);
}

TEST(RenderMarkdownTest, ContainsTablesAndValues) {
  const std::string md = RenderMarkdown(SampleReport());
  EXPECT_TRUE(Contains(md, "| negation | 120 | 1000 | 12.0% |")) << md;
  EXPECT_TRUE(Contains(md, "Adjusted R^2 by setting"));
  EXPECT_TRUE(Contains(md, "| **mean** | 0.3500 | 0.4300 |"));
  EXPECT_TRUE(Contains(md, "on 1/2 target domains"));
  EXPECT_TRUE(Contains(md, "books"));
  EXPECT_TRUE(Contains(md, "0.5500"));
  EXPECT_TRUE(Contains(md, "something to note"));
  EXPECT_TRUE(Contains(md, "negation_v2"));
  EXPECT_TRUE(Contains(md, "improvement = 0.2900 - 0.1750 * distance"));
}

TEST(RenderMarkdownTest, SlicesOnly) {
  Report r;
  r.config_hash = ConfigHash("");
  r.split = "all";
  r.slices = {{"shifter", 3, 10, 0.3}};
  const std::string md = RenderMarkdown(r);
  EXPECT_TRUE(Contains(md, "shifter"));
  EXPECT_FALSE(Contains(md, "Adjusted R^2 by setting"));
}

TEST(RenderCsvTest, FilesAndHeaders) {
  const auto files = RenderCsv(SampleReport());
  for (const char* name : {"capabilities.csv", "analysis.csv", "comparison.csv",
                           "distances.csv", "improvement_scatter.csv",
                           "improvement_fit.csv"}) {
    ASSERT_TRUE(files.count(name)) << name;
  }
  EXPECT_EQ(files.at("distances.csv").substr(0, 47),
            "source,target,classifier_error,proxy_a_distance");
  EXPECT_TRUE(Contains(files.at("capabilities.csv"), "negation,120,1000,0.12"));
}

TEST(RenderCsvTest, DistancesCsvParsesBack) {
  const Report r = SampleReport();
  const auto back = ParseDistancesCsv(RenderCsv(r).at("distances.csv"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].target, "music");
  EXPECT_EQ(back[1].proxy_a_distance, 1.6);
  EXPECT_THROW(ParseDistancesCsv("a,b\n"), ValidationError);
}

TEST(WriteReportTest, WritesAllFilesDeterministically) {
  testing::TempDir a("report_a");
  testing::TempDir b("report_b");
  WriteReport(SampleReport(), a.path());
  WriteReport(SampleReport(), b.path());
  for (const char* name : {"results.json", "report.md", "analysis.csv", "distances.csv"}) {
    std::ifstream fa(a.path() / name), fb(b.path() / name);
    ASSERT_TRUE(fa.good()) << name;
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_EQ(sa, sb) << name;
  }
}

TEST(AnalysisReportTest, SingleDomainGetsNotice) {
  AnalysisResult a;
  a.domains = {MakeDomain("books", 0.4, 0.5, 0.01)};
  const Report r = AnalysisReport(a, {{"home", "books", 0.2, 1.2}}, 3, "x");
  EXPECT_FALSE(r.improvement.has_value());
  ASSERT_EQ(r.notices.size(), 1u);
  EXPECT_TRUE(Contains(r.notices[0], "fewer than two target domains"));
  EXPECT_EQ(r.split_seed, 3u);
}

TEST(AnalysisReportTest, NoDistancesNoSplitSeed) {
  AnalysisResult a;
  a.domains = {MakeDomain("books", 0.4, 0.5, 0.01), MakeDomain("toys", 0.4, 0.5, 0.01)};
  const Report r = AnalysisReport(a, {}, 3, "x");
  EXPECT_FALSE(r.split_seed.has_value());
  EXPECT_FALSE(r.improvement.has_value());
}

}  // namespace
}  // namespace capeval
