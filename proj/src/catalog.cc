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

#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "capeval/errors.h"
#include "capeval/io.h"
#include "capeval/tokenizer.h"

namespace capeval {
namespace {

std::vector<std::string> SplitOnSpace(std::string_view s) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!current.empty()) parts.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) parts.push_back(std::move(current));
  return parts;
}

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

std::string At(const YAML::Node& node) {
  return fmt::format("line {}", node.Mark().line + 1);
}

std::string RequiredString(const YAML::Node& entry, const char* field,
                           bool allow_empty) {
  const YAML::Node value = entry[field];
  if (!value) {
    throw ValidationError(
        fmt::format("{}: capability is missing field '{}'", At(entry), field));
  }
  if (!value.IsScalar()) {
    throw ValidationError(
        fmt::format("{}: field '{}' must be a string", At(value), field));
  }
  std::string s = value.as<std::string>();
  if (!allow_empty && s.empty()) {
    throw ValidationError(
        fmt::format("{}: field '{}' must not be empty", At(value), field));
  }
  return s;
}

}  // namespace

KeywordRule KeywordRule::FromStrings(const std::vector<std::string>& raw) {
  KeywordRule rule;
  std::set<std::string> seen;
  for (const std::string& r : raw) {
    Keyword kw;
    kw.tokens = SplitOnSpace(AsciiLower(r));
    if (kw.tokens.empty()) throw ValidationError("empty keyword");
    for (const std::string& tok : kw.tokens) {
      const auto pieces = Tokenize(tok);
      if (pieces.size() != 1 || pieces[0] != tok) {
        throw ValidationError(fmt::format(
            "keyword '{}' contains '{}', which is not a single token", r, tok));
      }
    }
    kw.text = Join(kw.tokens);
    if (!seen.insert(kw.text).second) {
      throw ValidationError(fmt::format("duplicate keyword '{}'", kw.text));
    }
    rule.keywords.push_back(std::move(kw));
  }
  return rule;
}

std::vector<std::string> KeywordRule::Texts() const {
  std::vector<std::string> out;
  out.reserve(keywords.size());
  for (const Keyword& k : keywords) out.push_back(k.text);
  return out;
}

const Capability* Catalog::Find(std::string_view name) const {
  for (const Capability& c : capabilities) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<std::string> Catalog::Names() const {
  std::vector<std::string> out;
  out.reserve(capabilities.size());
  for (const Capability& c : capabilities) out.push_back(c.name);
  return out;
}

void ValidateCatalog(const Catalog& catalog) {
  std::set<std::string> names;
  for (const Capability& c : catalog.capabilities) {
    if (c.name.empty()) throw ValidationError("capability with empty name");
    if (!names.insert(c.name).second) {
      throw ValidationError(
          fmt::format("duplicate capability name '{}'", c.name));
    }
    if (c.instantiation.keywords.empty()) {
      throw ValidationError(
          fmt::format("capability '{}' has no keywords", c.name));
    }
    // Re-run keyword normalization to catch hand-built rules.
    KeywordRule::FromStrings(c.instantiation.Texts());
  }
}

Catalog ParseCatalogText(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ValidationError(fmt::format("line {}: malformed catalog: {}",
                                      e.mark.line + 1, e.msg));
  }
  if (!root.IsMap()) {
    throw ValidationError("catalog must be a mapping with 'version' and "
                          "'capabilities'");
  }
  Catalog catalog;
  const YAML::Node version = root["version"];
  if (!version || !version.IsScalar()) {
    throw ValidationError("catalog is missing string field 'version'");
  }
  catalog.version = version.as<std::string>();

  const YAML::Node caps = root["capabilities"];
  if (!caps || caps.IsNull()) return catalog;
  if (!caps.IsSequence()) {
    throw ValidationError(
        fmt::format("{}: 'capabilities' must be a list", At(caps)));
  }

  std::set<std::string> names;
  for (const YAML::Node& entry : caps) {
    if (!entry.IsMap()) {
      throw ValidationError(
          fmt::format("{}: capability entry must be a mapping", At(entry)));
    }
    Capability cap;
    cap.name = RequiredString(entry, "name", /*allow_empty=*/false);
    cap.description = RequiredString(entry, "description", true);
    cap.origin = RequiredString(entry, "origin", true);
    if (!names.insert(cap.name).second) {
      throw ValidationError(fmt::format(
          "{}: duplicate capability name '{}'", At(entry["name"]), cap.name));
    }

    const YAML::Node keywords = entry["keywords"];
    if (!keywords || !keywords.IsSequence()) {
      throw ValidationError(fmt::format(
          "{}: capability '{}' field 'keywords' must be a list", At(entry),
          cap.name));
    }
    if (keywords.size() == 0) {
      throw ValidationError(fmt::format(
          "{}: capability '{}' has an empty keyword list", At(keywords),
          cap.name));
    }
    std::vector<std::string> raw;
    for (const YAML::Node& k : keywords) {
      if (!k.IsScalar()) {
        throw ValidationError(
            fmt::format("{}: keywords must be strings", At(k)));
      }
      raw.push_back(k.as<std::string>());
    }
    try {
      cap.instantiation = KeywordRule::FromStrings(raw);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}: capability '{}' field 'keywords': {}",
                                        At(keywords), cap.name, e.what()));
    }
    catalog.capabilities.push_back(std::move(cap));
  }
  return catalog;
}

Catalog ParseCatalog(const std::filesystem::path& path) {
  return ParseCatalogText(ReadFile(path));
}

std::string WriteCatalog(const Catalog& catalog) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "version" << YAML::Value << YAML::DoubleQuoted
      << catalog.version;
  out << YAML::Key << "capabilities" << YAML::Value << YAML::BeginSeq;
  for (const Capability& c : catalog.capabilities) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << c.name;
    out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted
        << c.description;
    out << YAML::Key << "origin" << YAML::Value << YAML::DoubleQuoted
        << c.origin;
    out << YAML::Key << "keywords" << YAML::Value << YAML::Flow
        << YAML::BeginSeq;
    for (const Keyword& k : c.instantiation.keywords) {
      out << YAML::DoubleQuoted << k.text;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

Catalog DefaultCatalog() {
  constexpr const char* kOrigin = "sentiment analysis literature";
  auto make = [&](const char* name, const char* description,
                  std::vector<std::string> keywords) {
    return Capability{name, description, kOrigin,
                      KeywordRule::FromStrings(keywords)};
  };
  Catalog catalog;
  catalog.version = "1.0";
  catalog.capabilities = {
      make("negation", "Handles explicit negation of sentiment.",
           {"not", "n't"}),
      make("negation_v2", "Handles negation expressed by negative quantifiers "
                          "and adverbs.",
           {"no", "never", "neither", "nobody", "none", "nor", "nothing"}),
      make("shifter", "Handles verbs that shift or reverse polarity.",
           {"refuse", "reject", "deny", "doubt", "abandon", "miss", "question",
            "abort", "stop"}),
      make("modality", "Handles counterfactual modal constructions.",
           {"would have", "could have", "should have"}),
      make("comparative", "Handles comparisons between items.",
           {"better", "worse", "than"}),
      make("mixed", "Handles contrastive statements with mixed polarity.",
           {"but", "however", "though", "although", "despite", "even if",
            "rather than", "except that"}),
      make("reducer", "Handles intensity reducers.",
           {"kind of", "all that", "less", "a little", "somewhat", "still"}),
      make("amplifier", "Handles intensity amplifiers.",
           {"really", "very", "super", "so", "incredibly", "extremely",
            "at all", "whatsoever", "much"}),
  };
  return catalog;
}

}  // namespace capeval
