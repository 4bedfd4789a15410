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

#ifndef CAPEVAL_SLICER_H_
#define CAPEVAL_SLICER_H_

#include <cstddef>
#include <string>
#include <vector>

#include "capeval/catalog.h"
#include "capeval/corpus.h"

namespace capeval {

// The test suite of one capability over a set of examples.
struct Slice {
  std::string capability_name;
  std::vector<std::string> member_ids;  // in input order
  std::size_t total = 0;                // size of the sliced set

  // member count / total.
  double coverage() const;
};

// Single-token keywords match a token exactly, except the keyword "n't",
// which matches any token ending in "n't". Phrases match a contiguous run of
// tokens.
bool Matches(const Keyword& keyword, const std::vector<std::string>& tokens);

// True iff any keyword of the rule matches.
bool Matches(const KeywordRule& rule, const std::vector<std::string>& tokens);

// One slice per capability, in catalog order. Examples are matched on up to
// `jobs` threads. Throws ValidationError if `examples` is empty.
std::vector<Slice> Instantiate(const Catalog& catalog,
                               const std::vector<Example>& examples,
                               int jobs = 1);

// Text of a slice member file: one example id per line.
std::string WriteSliceMembers(const Slice& slice);

}  // namespace capeval

#endif  // CAPEVAL_SLICER_H_
