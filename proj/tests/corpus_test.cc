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

#include "capeval/corpus.h"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>
#include <gtest/gtest.h>

#include "capeval/errors.h"
#include "capeval/random.h"
#include "test_support.h"

namespace capeval {
namespace {

using testing::MakeExample;

std::string Record(const std::string& id, const std::string& domain,
                   const std::string& extra) {
  return "{\"id\":\"" + id + "\",\"text\":\"t " + id + "\",\"domain\":\"" +
         domain + "\"," + extra + "}\n";
}

TEST(BinarizeRatingTest, StrictInequalities) {
  EXPECT_EQ(BinarizeRating(5), Label::kPositive);
  EXPECT_EQ(BinarizeRating(4), Label::kPositive);
  EXPECT_EQ(BinarizeRating(2), Label::kNegative);
  EXPECT_EQ(BinarizeRating(1), Label::kNegative);
  EXPECT_FALSE(BinarizeRating(3).has_value());
}

TEST(BinarizeRatingTest, OutOfRangeRejected) {
  EXPECT_THROW(BinarizeRating(0), ValidationError);
  EXPECT_THROW(BinarizeRating(6), ValidationError);
  EXPECT_THROW(BinarizeRating(-3), ValidationError);
}

TEST(LoadCorpusTest, ThreeDomains) {
  const std::string text = Record("a1", "A", "\"rating\":5") +
                           Record("b1", "B", "\"label\":\"negative\"") +
                           Record("c1", "C", "\"rating\":1");
  const Corpus c = ParseCorpusText(text, "A", {"B", "C"});
  EXPECT_EQ(c.examples.size(), 3u);
  EXPECT_EQ(c.Domain("A").size(), 1u);
  EXPECT_EQ(c.target_domains, (std::vector<std::string>{"B", "C"}));
  EXPECT_EQ(c.examples[0].label, Label::kPositive);
  EXPECT_EQ(c.examples[0].split, "validation");
}

TEST(LoadCorpusTest, NeutralRatingsDroppedAndCounted) {
  const std::string text = Record("a1", "A", "\"rating\":3") +
                           Record("a2", "A", "\"rating\":4") +
                           Record("b1", "B", "\"rating\":3") +
                           Record("b2", "B", "\"rating\":2");
  LoadReport report;
  const Corpus c = ParseCorpusText(text, "A", {"B"}, &report);
  EXPECT_EQ(report.records, 4u);
  EXPECT_EQ(report.dropped_neutral, 2u);
  ASSERT_EQ(c.examples.size(), 2u);
  EXPECT_EQ(c.examples[0].id, "a2");
  EXPECT_EQ(c.examples[1].id, "b2");
}

TEST(LoadCorpusTest, SourceAmongTargetsRejected) {
  const std::string text = Record("a1", "A", "\"rating\":5");
  EXPECT_THROW(ParseCorpusText(text, "A", {"A"}), ValidationError);
}

TEST(LoadCorpusTest, MissingDomainNamed) {
  const std::string text = Record("a1", "A", "\"rating\":5");
  try {
    ParseCorpusText(text, "A", {"Z"});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("Z"), std::string::npos);
  }
}

TEST(LoadCorpusTest, DuplicateIdRejected) {
  const std::string text =
      Record("r1", "A", "\"rating\":5") + Record("r1", "A", "\"rating\":1");
  EXPECT_THROW(ParseCorpusText(text, "A", {}), ValidationError);
}

TEST(LoadCorpusTest, MalformedRecordCarriesIndex) {
  const std::string text = Record("a1", "A", "\"rating\":5") + "{not json}\n";
  try {
    ParseCorpusText(text, "A", {});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("record 2"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpusTest, RatingAndLabelAreExclusive) {
  EXPECT_THROW(
      ParseCorpusText(Record("a1", "A", "\"rating\":5,\"label\":\"positive\""), "A", {}),
      ValidationError);
  EXPECT_THROW(ParseCorpusText(Record("a1", "A", "\"split\":\"test\""), "A", {}),
               ValidationError);
}

TEST(LoadCorpusTest, EmptyTextRejected) {
  const std::string text =
      "{\"id\":\"a\",\"text\":\"\",\"domain\":\"A\",\"rating\":5}\n";
  EXPECT_THROW(ParseCorpusText(text, "A", {}), ValidationError);
}

TEST(LoadCorpusTest, MissingFileIsIoError) {
  EXPECT_THROW(LoadCorpus("/nonexistent/corpus.jsonl", "A", {}), IoError);
}

TEST(LoadCorpusTest, WriteThenParseRoundTrip) {
  std::vector<Example> ex = {
      MakeExample("x1", "Quote \" and \\ slash", Label::kPositive, "A", "train"),
      MakeExample("x2", "caf\xc3\xa9", Label::kNegative, "B", "validation")};
  const Corpus c = ParseCorpusText(WriteCorpusRecords(ex), "A", {"B"});
  EXPECT_EQ(c.examples, ex);
}

TEST(SourceSplitTest, ValidationVersusAll) {
  Corpus c;
  c.source_domain = "A";
  c.examples = {MakeExample("1", "t", Label::kPositive, "A", "train"),
                MakeExample("2", "t", Label::kPositive, "A", "validation"),
                MakeExample("3", "t", Label::kPositive, "B", "validation")};
  EXPECT_EQ(SourceEvaluationSplit(c, SplitMode::kValidation).size(), 1u);
  EXPECT_EQ(SourceEvaluationSplit(c, SplitMode::kAll).size(), 2u);
  EXPECT_THROW(ParseSplitMode("train"), ValidationError);
}

std::vector<Example> ClassMix(std::size_t pos, std::size_t neg) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < pos + neg; ++i) {
    // Interleave so class order is not trivially contiguous.
    const bool positive = (i % 2 == 0 && i / 2 < pos) || i >= 2 * neg;
    out.push_back(MakeExample("e" + std::to_string(i), "t",
                              positive ? Label::kPositive : Label::kNegative));
  }
  return out;
}

std::size_t CountLabel(const std::vector<Example>& ex, Label label) {
  return static_cast<std::size_t>(std::count_if(
      ex.begin(), ex.end(), [&](const Example& e) { return e.label == label; }));
}

// Reference sampler: seeded partial Fisher-Yates over the majority class
// examples themselves, using the documented engine and distribution.
std::vector<std::string> ReferenceBalancedIds(const std::vector<Example>& ex,
                                              uint64_t seed) {
  std::vector<const Example*> pos, neg;
  for (const Example& e : ex) (e.label == Label::kPositive ? pos : neg).push_back(&e);
  const std::size_t k = std::min(pos.size(), neg.size());
  boost::random::mt19937_64 engine(seed);
  auto draw = [&](std::vector<const Example*> cls) {
    if (cls.size() <= k) return cls;
    for (std::size_t i = 0; i < k; ++i) {
      boost::random::uniform_int_distribution<std::size_t> pick(0, cls.size() - i - 1);
      std::swap(cls[i], cls[i + pick(engine)]);
    }
    cls.resize(k);
    return cls;
  };
  const auto p = draw(pos);
  const auto n = draw(neg);
  std::vector<std::string> ids;
  for (const Example& e : ex) {
    const bool in = std::find(p.begin(), p.end(), &e) != p.end() ||
                    std::find(n.begin(), n.end(), &e) != n.end();
    if (in) ids.push_back(e.id);
  }
  return ids;
}

TEST(BalancedSampleTest, SixtyForty) {
  const auto ex = ClassMix(60, 40);
  const auto out = BalancedSample(ex, 0);
  EXPECT_EQ(CountLabel(out, Label::kPositive), 40u);
  EXPECT_EQ(CountLabel(out, Label::kNegative), 40u);
  std::vector<std::string> ids;
  for (const Example& e : out) ids.push_back(e.id);
  EXPECT_EQ(ids, ReferenceBalancedIds(ex, 0));
}

TEST(BalancedSampleTest, MatchesReferenceAcrossSeeds) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto ex = ClassMix(10 + seed % 7, 25 + seed % 5);
    std::vector<std::string> ids;
    for (const Example& e : BalancedSample(ex, seed)) ids.push_back(e.id);
    ASSERT_EQ(ids, ReferenceBalancedIds(ex, seed)) << "seed " << seed;
  }
}

TEST(BalancedSampleTest, AlreadyBalancedUnchanged) {
  const auto ex = ClassMix(10, 10);
  EXPECT_EQ(BalancedSample(ex, 5), ex);
}

TEST(BalancedSampleTest, MissingClassRejected) {
  EXPECT_THROW(BalancedSample(ClassMix(5, 0), 0), ValidationError);
}

TEST(BalancedSampleTest, DeterministicPerSeed) {
  const auto ex = ClassMix(80, 20);
  EXPECT_EQ(BalancedSample(ex, 9), BalancedSample(ex, 9));
  EXPECT_NE(BalancedSample(ex, 9), BalancedSample(ex, 10));
}

TEST(BalancedSampleTest, EqualCountsProperty) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = 1 + UniformIndex(rng, 30);
    const std::size_t n = 1 + UniformIndex(rng, 30);
    const auto out = BalancedSample(ClassMix(p, n), static_cast<uint64_t>(trial));
    ASSERT_EQ(CountLabel(out, Label::kPositive), std::min(p, n));
    ASSERT_EQ(CountLabel(out, Label::kNegative), std::min(p, n));
  }
}

TEST(BalanceByDomainTest, BalancesEachDomainAndCaps) {
  std::vector<Example> ex;
  for (int i = 0; i < 30; ++i) {
    ex.push_back(MakeExample("a" + std::to_string(i), "t",
                             i < 20 ? Label::kPositive : Label::kNegative, "A"));
    ex.push_back(MakeExample("b" + std::to_string(i), "t",
                             i < 5 ? Label::kPositive : Label::kNegative, "B"));
  }
  const auto out = BalanceByDomain(ex, 1, std::nullopt);
  std::map<std::string, std::map<Label, int>> counts;
  for (const Example& e : out) ++counts[e.domain][e.label];
  EXPECT_EQ(counts["A"][Label::kPositive], 10);
  EXPECT_EQ(counts["A"][Label::kNegative], 10);
  EXPECT_EQ(counts["B"][Label::kPositive], 5);
  EXPECT_EQ(counts["B"][Label::kNegative], 5);

  const auto capped = BalanceByDomain(ex, 1, 3);
  EXPECT_EQ(capped.size(), 12u);
}

}  // namespace
}  // namespace capeval
