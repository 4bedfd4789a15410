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

#ifndef CAPEVAL_CORPUS_H_
#define CAPEVAL_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace capeval {

enum class Label { kNegative = 0, kPositive = 1 };

std::string_view LabelName(Label label);

// Accepts "positive" / "negative". Throws ValidationError otherwise.
Label ParseLabel(std::string_view s);

// Split tag given to records that do not carry one.
inline constexpr std::string_view kDefaultSplit = "validation";

struct Example {
  std::string id;
  std::string text;
  Label label = Label::kNegative;
  std::string domain;
  std::string split{kDefaultSplit};

  bool operator==(const Example&) const = default;
};

struct Corpus {
  std::vector<Example> examples;
  std::string source_domain;
  std::vector<std::string> target_domains;

  std::vector<Example> Domain(std::string_view domain) const;
};

// Which source-domain examples form the evaluation split for slicing and
// source accuracy.
enum class SplitMode { kValidation, kAll };

SplitMode ParseSplitMode(std::string_view s);

// Source examples in the evaluation split, in corpus order. With kValidation
// only records tagged split == "validation" are kept.
std::vector<Example> SourceEvaluationSplit(const Corpus& corpus,
                                           SplitMode mode);

struct LoadReport {
  std::size_t records = 0;
  std::size_t dropped_neutral = 0;  // rating 3
};

// rating > 3 -> positive, rating < 3 -> negative, rating 3 -> nullopt.
// Throws ValidationError for ratings outside 1..5.
std::optional<Label> BinarizeRating(int rating);

// Checks corpus invariants: unique ids, non-empty text, source and targets
// present in the data, source not among targets. Throws ValidationError.
void ValidateCorpus(const Corpus& corpus);

// Parses line-delimited JSON records:
//   {"id": "r1", "text": "...", "rating": 5, "domain": "books"}
//   {"id": "r2", "text": "...", "label": "negative", "domain": "books",
//    "split": "validation"}
// Blank lines are ignored. Errors carry the 1-based record index.
Corpus ParseCorpusText(std::string_view text, const std::string& source_domain,
                       const std::vector<std::string>& target_domains,
                       LoadReport* report = nullptr);

Corpus LoadCorpus(const std::filesystem::path& path,
                  const std::string& source_domain,
                  const std::vector<std::string>& target_domains,
                  LoadReport* report = nullptr);

// Serializes examples in the record format above, using "label".
std::string WriteCorpusRecords(const std::vector<Example>& examples);

// Downsamples the majority class to the minority count, choosing uniformly
// without replacement with the given seed. Output keeps input order.
// Throws ValidationError if a class is absent.
std::vector<Example> BalancedSample(const std::vector<Example>& examples,
                                    uint64_t seed);

// Applies BalancedSample to every domain independently (seed derived from
// the domain name). When `per_class_cap` is set each class is further
// limited to at most that many examples. Domains keep their input order.
std::vector<Example> BalanceByDomain(const std::vector<Example>& examples,
                                     uint64_t seed,
                                     std::optional<std::size_t> per_class_cap);

}  // namespace capeval

#endif  // CAPEVAL_CORPUS_H_
