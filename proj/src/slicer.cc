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

#include "capeval/slicer.h"

#include <algorithm>
#include <string_view>

#include "capeval/errors.h"
#include "capeval/parallel.h"
#include "capeval/tokenizer.h"

namespace capeval {
namespace {

constexpr std::string_view kContractedNegation = "n't";

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

double Slice::coverage() const {
  if (total == 0) return 0.0;
  return static_cast<double>(member_ids.size()) / static_cast<double>(total);
}

bool Matches(const Keyword& keyword, const std::vector<std::string>& tokens) {
  const auto& needle = keyword.tokens;
  if (needle.empty() || needle.size() > tokens.size()) return false;
  if (needle.size() == 1) {
    if (needle[0] == kContractedNegation) {
      return std::any_of(tokens.begin(), tokens.end(), [](const auto& t) {
        return EndsWith(t, kContractedNegation);
      });
    }
    return std::find(tokens.begin(), tokens.end(), needle[0]) != tokens.end();
  }
  return std::search(tokens.begin(), tokens.end(), needle.begin(),
                     needle.end()) != tokens.end();
}

bool Matches(const KeywordRule& rule, const std::vector<std::string>& tokens) {
  return std::any_of(rule.keywords.begin(), rule.keywords.end(),
                     [&](const Keyword& k) { return Matches(k, tokens); });
}

std::vector<Slice> Instantiate(const Catalog& catalog,
                               const std::vector<Example>& examples, int jobs) {
  if (examples.empty()) {
    throw ValidationError("cannot instantiate capabilities on an empty set");
  }
  const std::size_t n_caps = catalog.capabilities.size();
  // hits[i * n_caps + c] == 1 iff example i is in slice c.
  std::vector<char> hits(examples.size() * n_caps, 0);
  ParallelFor(examples.size(), jobs, [&](std::size_t i) {
    const auto tokens = Tokenize(examples[i].text);
    for (std::size_t c = 0; c < n_caps; ++c) {
      hits[i * n_caps + c] =
          Matches(catalog.capabilities[c].instantiation, tokens) ? 1 : 0;
    }
  });

  std::vector<Slice> slices(n_caps);
  for (std::size_t c = 0; c < n_caps; ++c) {
    slices[c].capability_name = catalog.capabilities[c].name;
    slices[c].total = examples.size();
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (hits[i * n_caps + c]) slices[c].member_ids.push_back(examples[i].id);
    }
  }
  return slices;
}

std::string WriteSliceMembers(const Slice& slice) {
  std::string out;
  for (const std::string& id : slice.member_ids) {
    out += id;
    out.push_back('\n');
  }
  return out;
}

}  // namespace capeval
