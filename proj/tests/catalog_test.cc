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

#include "capeval/catalog.h"

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "capeval/errors.h"
#include "capeval/io.h"
#include "capeval/random.h"
#include "test_support.h"

namespace capeval {
namespace {

using Strings = std::vector<std::string>;

Strings KeywordsOf(const Catalog& c, const std::string& name) {
  const Capability* cap = c.Find(name);
  return cap ? cap->instantiation.Texts() : Strings{};
}

TEST(DefaultCatalogTest, EightCapabilitiesInOrder) {
  const Catalog c = DefaultCatalog();
  EXPECT_EQ(c.Names(), (Strings{"negation", "negation_v2", "shifter", "modality",
                                "comparative", "mixed", "reducer", "amplifier"}));
}

TEST(DefaultCatalogTest, KeywordLists) {
  const Catalog c = DefaultCatalog();
  EXPECT_EQ(KeywordsOf(c, "negation"), (Strings{"not", "n't"}));
  EXPECT_EQ(KeywordsOf(c, "negation_v2"),
            (Strings{"no", "never", "neither", "nobody", "none", "nor", "nothing"}));
  EXPECT_EQ(KeywordsOf(c, "shifter"),
            (Strings{"refuse", "reject", "deny", "doubt", "abandon", "miss",
                     "question", "abort", "stop"}));
  EXPECT_EQ(KeywordsOf(c, "modality"),
            (Strings{"would have", "could have", "should have"}));
  EXPECT_EQ(KeywordsOf(c, "comparative"), (Strings{"better", "worse", "than"}));
  EXPECT_EQ(KeywordsOf(c, "mixed"),
            (Strings{"but", "however", "though", "although", "despite", "even if",
                     "rather than", "except that"}));
  EXPECT_EQ(KeywordsOf(c, "reducer"),
            (Strings{"kind of", "all that", "less", "a little", "somewhat", "still"}));
  EXPECT_EQ(KeywordsOf(c, "amplifier"),
            (Strings{"really", "very", "super", "so", "incredibly", "extremely",
                     "at all", "whatsoever", "much"}));
}

TEST(DefaultCatalogTest, PassesValidation) {
  EXPECT_NO_THROW(ValidateCatalog(DefaultCatalog()));
}

TEST(DefaultCatalogTest, ShippedFileMatchesBuiltIn) {
  const std::string root = CAPEVAL_TEST_SOURCE_DIR;
  const Catalog shipped =
      ParseCatalog(std::filesystem::path(root) / "data" / "default_catalog.yaml");
  EXPECT_EQ(shipped, DefaultCatalog());
}

TEST(ParseCatalogTest, RoundTripDefault) {
  const Catalog c = DefaultCatalog();
  EXPECT_EQ(ParseCatalogText(WriteCatalog(c)), c);
}

// Random catalogs built from a small vocabulary survive write then parse.
TEST(ParseCatalogTest, RoundTripRandom) {
  const Strings words = {"good", "bad", "not", "n't", "would", "have", "x1", "y2"};
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    Catalog c;
    c.version = "v" + std::to_string(trial);
    const std::size_t caps = UniformIndex(rng, 4);
    for (std::size_t i = 0; i < caps; ++i) {
      Capability cap;
      cap.name = "cap" + std::to_string(i);
      cap.description = trial % 2 ? "quoted: \"yes\", # not a comment" : "";
      cap.origin = "error analysis";
      Strings raw;
      for (const std::string& w : words) {
        if (UniformIndex(rng, 3) == 0) raw.push_back(w);
      }
      if (raw.size() >= 2 && UniformIndex(rng, 2)) raw[0] = raw[0] + " " + raw[1];
      if (raw.empty()) raw.push_back("fallback");
      cap.instantiation = KeywordRule::FromStrings(raw);
      c.capabilities.push_back(cap);
    }
    ASSERT_EQ(ParseCatalogText(WriteCatalog(c)), c) << WriteCatalog(c);
  }
}

TEST(ParseCatalogTest, EmptyCatalogIsValid) {
  const Catalog c = ParseCatalogText("version: \"2\"\ncapabilities: []\n");
  EXPECT_EQ(c.version, "2");
  EXPECT_TRUE(c.capabilities.empty());
}

TEST(ParseCatalogTest, DuplicateNameRejected) {
  const std::string text =
      "version: \"1\"\n"
      "capabilities:\n"
      "  - {name: negation, description: a, origin: b, keywords: [not]}\n"
      "  - {name: negation, description: a, origin: b, keywords: [never]}\n";
  EXPECT_THROW(ParseCatalogText(text), ValidationError);
}

TEST(ParseCatalogTest, EmptyKeywordListRejected) {
  const std::string text =
      "version: \"1\"\n"
      "capabilities:\n"
      "  - {name: negation, description: a, origin: b, keywords: []}\n";
  EXPECT_THROW(ParseCatalogText(text), ValidationError);
}

TEST(ParseCatalogTest, MalformedFileReportsLine) {
  const std::string text = "version: \"1\"\ncapabilities:\n  - name: [unclosed\n";
  try {
    ParseCatalogText(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
}

TEST(ParseCatalogTest, MissingFieldNamed) {
  const std::string text =
      "version: \"1\"\ncapabilities:\n  - {description: a, origin: b, keywords: [x]}\n";
  try {
    ParseCatalogText(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("name"), std::string::npos) << e.what();
  }
}

TEST(ParseCatalogTest, MissingFileIsIoError) {
  EXPECT_THROW(ParseCatalog("/nonexistent/catalog.yaml"), IoError);
}

TEST(KeywordRuleTest, NormalizesCaseAndSpacing) {
  const KeywordRule rule = KeywordRule::FromStrings({"  Would   HAVE "});
  ASSERT_EQ(rule.keywords.size(), 1u);
  EXPECT_EQ(rule.keywords[0].text, "would have");
  EXPECT_EQ(rule.keywords[0].tokens, (Strings{"would", "have"}));
}

TEST(KeywordRuleTest, RejectsEmptyAndDuplicates) {
  EXPECT_THROW(KeywordRule::FromStrings({"   "}), ValidationError);
  EXPECT_THROW(KeywordRule::FromStrings({"not", "NOT"}), ValidationError);
  EXPECT_THROW(KeywordRule::FromStrings({"well-known"}), ValidationError);
}

}  // namespace
}  // namespace capeval
