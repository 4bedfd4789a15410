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

#ifndef CAPEVAL_CATALOG_H_
#define CAPEVAL_CATALOG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace capeval {

// A single keyword or multi-token phrase, e.g. "not" or "would have".
struct Keyword {
  std::string text;                 // normalized: lowercase, single spaces
  std::vector<std::string> tokens;  // text split on spaces

  bool operator==(const Keyword& other) const { return text == other.text; }
};

// Instantiation rule for slicing: an example belongs to the capability's
// test suite if any keyword occurs in it.
struct KeywordRule {
  std::vector<Keyword> keywords;

  // Builds a rule from raw keyword strings. Throws ValidationError on empty
  // or duplicate keywords, or on keywords the tokenizer could never produce.
  static KeywordRule FromStrings(const std::vector<std::string>& raw);

  std::vector<std::string> Texts() const;

  bool operator==(const KeywordRule&) const = default;
};

struct Capability {
  std::string name;
  std::string description;
  std::string origin;  // free-form provenance, e.g. "error analysis"
  KeywordRule instantiation;

  bool operator==(const Capability&) const = default;
};

struct Catalog {
  std::string version;
  std::vector<Capability> capabilities;

  const Capability* Find(std::string_view name) const;
  std::vector<std::string> Names() const;

  bool operator==(const Catalog&) const = default;
};

// Checks catalog invariants (unique non-empty names, non-empty rules).
// Throws ValidationError.
void ValidateCatalog(const Catalog& catalog);

// Parses the YAML catalog format:
//
//   version: "1.0"
//   capabilities:
//     - name: negation
//       description: ...
//       origin: ...
//       keywords: ["not", "n't"]
//
// Throws ValidationError with the offending line and field.
Catalog ParseCatalogText(std::string_view text);

// Throws IoError if the file cannot be read.
Catalog ParseCatalog(const std::filesystem::path& path);

// Serializes in the format accepted by ParseCatalogText.
std::string WriteCatalog(const Catalog& catalog);

// The eight sentiment-analysis capabilities with their slicing keywords.
Catalog DefaultCatalog();

}  // namespace capeval

#endif  // CAPEVAL_CATALOG_H_
