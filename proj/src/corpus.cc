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
#include <set>
#include <unordered_set>

#include <fmt/format.h>
#include "json.hpp"

#include "capeval/errors.h"
#include "capeval/io.h"
#include "capeval/random.h"

namespace capeval {
namespace {

using json = nlohmann::json;

std::string RequireString(const json& record, const char* field,
                          std::size_t index) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw ValidationError(fmt::format(
        "record {}: missing or non-string field '{}'", index, field));
  }
  return it->get<std::string>();
}

// Picks `k` of the indices in `members` uniformly; returns them sorted.
std::vector<std::size_t> Choose(Rng& rng, const std::vector<std::size_t>& members,
                                std::size_t k) {
  if (k >= members.size()) return members;
  std::vector<std::size_t> picked;
  picked.reserve(k);
  for (std::size_t i : SampleWithoutReplacement(rng, members.size(), k)) {
    picked.push_back(members[i]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

std::string_view LabelName(Label label) {
  return label == Label::kPositive ? "positive" : "negative";
}

Label ParseLabel(std::string_view s) {
  if (s == "positive") return Label::kPositive;
  if (s == "negative") return Label::kNegative;
  throw ValidationError(fmt::format(
      "unknown label '{}' (expected 'positive' or 'negative')", s));
}

std::vector<Example> Corpus::Domain(std::string_view domain) const {
  std::vector<Example> out;
  for (const Example& e : examples) {
    if (e.domain == domain) out.push_back(e);
  }
  return out;
}

SplitMode ParseSplitMode(std::string_view s) {
  if (s == "validation") return SplitMode::kValidation;
  if (s == "all") return SplitMode::kAll;
  throw ValidationError(
      fmt::format("unknown split '{}' (expected 'validation' or 'all')", s));
}

std::vector<Example> SourceEvaluationSplit(const Corpus& corpus,
                                           SplitMode mode) {
  std::vector<Example> out;
  for (const Example& e : corpus.examples) {
    if (e.domain != corpus.source_domain) continue;
    if (mode == SplitMode::kValidation && e.split != kDefaultSplit) continue;
    out.push_back(e);
  }
  return out;
}

std::optional<Label> BinarizeRating(int rating) {
  if (rating < 1 || rating > 5) {
    throw ValidationError(
        fmt::format("rating {} outside the range 1..5", rating));
  }
  if (rating > 3) return Label::kPositive;
  if (rating < 3) return Label::kNegative;
  return std::nullopt;
}

void ValidateCorpus(const Corpus& corpus) {
  std::unordered_set<std::string> ids;
  std::set<std::string> domains;
  for (const Example& e : corpus.examples) {
    if (!ids.insert(e.id).second) {
      throw ValidationError(fmt::format("duplicate example id '{}'", e.id));
    }
    if (e.text.empty()) {
      throw ValidationError(fmt::format("example '{}' has empty text", e.id));
    }
    domains.insert(e.domain);
  }
  if (corpus.source_domain.empty()) {
    throw ValidationError("source domain must be named");
  }
  if (!domains.count(corpus.source_domain)) {
    throw ValidationError(fmt::format("source domain '{}' not present in data",
                                      corpus.source_domain));
  }
  std::set<std::string> seen_targets;
  for (const std::string& t : corpus.target_domains) {
    if (t == corpus.source_domain) {
      throw ValidationError(fmt::format(
          "source domain '{}' is also listed as a target domain", t));
    }
    if (!seen_targets.insert(t).second) {
      throw ValidationError(fmt::format("target domain '{}' listed twice", t));
    }
    if (!domains.count(t)) {
      throw ValidationError(
          fmt::format("target domain '{}' not present in data", t));
    }
  }
}

Corpus ParseCorpusText(std::string_view text, const std::string& source_domain,
                       const std::vector<std::string>& target_domains,
                       LoadReport* report) {
  Corpus corpus;
  corpus.source_domain = source_domain;
  corpus.target_domains = target_domains;
  LoadReport local;

  std::size_t index = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    ++index;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(
          fmt::format("record {}: malformed JSON: {}", index, e.what()));
    }
    if (!record.is_object()) {
      throw ValidationError(fmt::format("record {}: not an object", index));
    }

    Example ex;
    ex.id = RequireString(record, "id", index);
    ex.text = RequireString(record, "text", index);
    ex.domain = RequireString(record, "domain", index);
    if (record.contains("split")) ex.split = RequireString(record, "split", index);

    const bool has_rating = record.contains("rating");
    const bool has_label = record.contains("label");
    if (has_rating == has_label) {
      throw ValidationError(fmt::format(
          "record {}: exactly one of 'rating' or 'label' is required", index));
    }
    if (has_rating) {
      const json& r = record["rating"];
      if (!r.is_number_integer()) {
        throw ValidationError(
            fmt::format("record {}: 'rating' must be an integer", index));
      }
      std::optional<Label> label;
      try {
        label = BinarizeRating(r.get<int>());
      } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("record {}: {}", index, e.what()));
      }
      ++local.records;
      if (!label) {
        ++local.dropped_neutral;
        continue;
      }
      ex.label = *label;
    } else {
      try {
        ex.label = ParseLabel(RequireString(record, "label", index));
      } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("record {}: {}", index, e.what()));
      }
      ++local.records;
    }
    corpus.examples.push_back(std::move(ex));
  }

  ValidateCorpus(corpus);
  if (report) *report = local;
  return corpus;
}

Corpus LoadCorpus(const std::filesystem::path& path,
                  const std::string& source_domain,
                  const std::vector<std::string>& target_domains,
                  LoadReport* report) {
  return ParseCorpusText(ReadFile(path), source_domain, target_domains,
                         report);
}

std::string WriteCorpusRecords(const std::vector<Example>& examples) {
  std::string out;
  for (const Example& e : examples) {
    json record = json::object();
    record["id"] = e.id;
    record["text"] = e.text;
    record["label"] = std::string(LabelName(e.label));
    record["domain"] = e.domain;
    record["split"] = e.split;
    out += record.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<Example> BalancedSample(const std::vector<Example>& examples,
                                    uint64_t seed) {
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    (examples[i].label == Label::kPositive ? positives : negatives).push_back(i);
  }
  if (positives.empty() || negatives.empty()) {
    throw ValidationError(fmt::format(
        "balanced sampling needs both classes (positive={}, negative={})",
        positives.size(), negatives.size()));
  }
  const std::size_t k = std::min(positives.size(), negatives.size());
  Rng rng(seed);
  std::vector<std::size_t> keep =
      positives.size() > k ? Choose(rng, positives, k) : positives;
  const std::vector<std::size_t> kept_neg =
      negatives.size() > k ? Choose(rng, negatives, k) : negatives;
  keep.insert(keep.end(), kept_neg.begin(), kept_neg.end());
  std::sort(keep.begin(), keep.end());

  std::vector<Example> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(examples[i]);
  return out;
}

std::vector<Example> BalanceByDomain(const std::vector<Example>& examples,
                                     uint64_t seed,
                                     std::optional<std::size_t> per_class_cap) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> by_domain;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto [it, inserted] = by_domain.try_emplace(examples[i].domain);
    if (inserted) order.push_back(examples[i].domain);
    it->second.push_back(i);
  }

  std::vector<Example> out;
  for (const std::string& domain : order) {
    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
    for (std::size_t i : by_domain[domain]) {
      (examples[i].label == Label::kPositive ? positives : negatives)
          .push_back(i);
    }
    if (positives.empty() || negatives.empty()) {
      throw ValidationError(fmt::format(
          "domain '{}': balanced sampling needs both classes", domain));
    }
    std::size_t k = std::min(positives.size(), negatives.size());
    if (per_class_cap) k = std::min(k, *per_class_cap);
    Rng rng(DeriveSeed(seed, domain));
    std::vector<std::size_t> keep = Choose(rng, positives, k);
    const std::vector<std::size_t> kept_neg = Choose(rng, negatives, k);
    keep.insert(keep.end(), kept_neg.begin(), kept_neg.end());
    std::sort(keep.begin(), keep.end());
    for (std::size_t i : keep) out.push_back(examples[i]);
  }
  return out;
}

}  // namespace capeval
