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

#include "capeval/simulator.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "capeval/errors.h"
#include "capeval/parallel.h"
#include "capeval/random.h"
#include "capeval/slicer.h"
#include "capeval/stats.h"
#include "capeval/tokenizer.h"
#include "json.hpp"

namespace capeval {
namespace {

using json = nlohmann::ordered_json;

// A keyword as it is spliced into synthetic text, with the capabilities
// whose rules it triggers.
struct RenderedKeyword {
  std::string text;
  std::vector<std::size_t> matched;  // capability indices
};

// mixture entry -> its keywords; "none" has no keywords.
struct MixtureEntry {
  std::string type;
  double weight = 0.0;
  std::vector<RenderedKeyword> keywords;
};

std::string Render(const Keyword& k) {
  // A bare "n't" is not a word; attach it to a verb.
  return k.text == "n't" ? "don't" : k.text;
}

std::vector<MixtureEntry> Entries(const SimConfig& config,
                                  const SimDomain& domain) {
  const auto& caps = config.capabilities.capabilities;
  std::vector<MixtureEntry> entries;
  for (const auto& [type, weight] : domain.mixture) {
    MixtureEntry e{type, weight, {}};
    if (type != kNoCapability) {
      const Capability* cap = config.capabilities.Find(type);
      for (const Keyword& k : cap->instantiation.keywords) {
        RenderedKeyword r{Render(k), {}};
        const auto tokens = Tokenize(r.text);
        for (std::size_t c = 0; c < caps.size(); ++c) {
          if (Matches(caps[c].instantiation, tokens)) r.matched.push_back(c);
        }
        e.keywords.push_back(std::move(r));
      }
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<const SimDomain*> AllDomains(const SimConfig& config) {
  std::vector<const SimDomain*> out{&config.source};
  for (const SimDomain& t : config.targets) out.push_back(&t);
  return out;
}

// Sum_c coef_dc * offset_mc for model m.
double CoefficientTerm(const SimConfig& config, const SimDomain& domain,
                       const SimModels& models, Eigen::Index m) {
  double total = 0.0;
  const auto& caps = config.capabilities.capabilities;
  for (std::size_t c = 0; c < caps.size(); ++c) {
    auto it = domain.coefficients.find(caps[c].name);
    if (it != domain.coefficients.end()) {
      total += it->second * models.offsets(m, static_cast<Eigen::Index>(c));
    }
  }
  return total;
}

double Clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

void RequireMap(const YAML::Node& node, const char* what) {
  if (node && !node.IsMap()) {
    throw ValidationError(fmt::format("line {}: '{}' must be a mapping",
                                      node.Mark().line + 1, what));
  }
}

SimDomain ParseDomain(const YAML::Node& node, const char* what) {
  if (!node || !node.IsMap()) {
    throw ValidationError(fmt::format("'{}' must be a mapping with 'name' and "
                                      "'mixture'",
                                      what));
  }
  SimDomain d;
  if (!node["name"]) {
    throw ValidationError(fmt::format("line {}: {} is missing 'name'",
                                      node.Mark().line + 1, what));
  }
  d.name = node["name"].as<std::string>();
  RequireMap(node["mixture"], "mixture");
  RequireMap(node["coefficients"], "coefficients");
  if (node["mixture"]) {
    d.mixture = node["mixture"].as<std::map<std::string, double>>();
  }
  if (node["coefficients"]) {
    d.coefficients = node["coefficients"].as<std::map<std::string, double>>();
  }
  return d;
}

}  // namespace

double SimConfig::OffsetSd(const std::string& capability) const {
  auto it = offset_sd.find(capability);
  return it == offset_sd.end() ? default_offset_sd : it->second;
}

void ValidateSimConfig(const SimConfig& config) {
  std::vector<std::string> problems;
  if (config.model_count == 0) problems.emplace_back("models.count must be > 0");
  if (config.examples_per_domain == 0) {
    problems.emplace_back("examples_per_domain must be > 0");
  }
  if (config.filler_vocabulary == 0) {
    problems.emplace_back("filler.vocabulary must be > 0");
  }
  if (config.min_filler_tokens > config.max_filler_tokens) {
    problems.emplace_back("filler.min_tokens exceeds filler.max_tokens");
  }
  if (!(config.base_skill_low >= 0.0 && config.base_skill_low <= 1.0 &&
        config.base_skill_high >= config.base_skill_low &&
        config.base_skill_high <= 1.0)) {
    problems.emplace_back("models.base_skill must be [low, high] within [0, 1]");
  }
  if (!(config.default_offset_sd >= 0.0)) {
    problems.emplace_back("models.offset_sd must be >= 0");
  }
  for (const auto& [name, sd] : config.offset_sd) {
    if (!config.capabilities.Find(name)) {
      problems.push_back(
          fmt::format("models.offset_sd names unknown capability '{}'", name));
    }
    if (!(sd >= 0.0)) {
      problems.push_back(fmt::format("models.offset_sd.{} must be >= 0", name));
    }
  }
  if (!(config.observation_noise >= 0.0)) {
    problems.emplace_back("observation_noise must be >= 0");
  }
  try {
    ValidateCatalog(config.capabilities);
  } catch (const ValidationError& e) {
    problems.push_back(fmt::format("capabilities: {}", e.what()));
  }

  std::set<std::string> names;
  for (const SimDomain* d : AllDomains(config)) {
    const bool is_source = d == &config.source;
    const std::string where =
        is_source ? "source" : fmt::format("targets[{}]", d->name);
    if (d->name.empty()) problems.push_back(where + ".name must be non-empty");
    if (!names.insert(d->name).second) {
      problems.push_back(fmt::format("domain name '{}' used twice", d->name));
    }
    if (d->mixture.empty()) problems.push_back(where + ".mixture is empty");
    double total = 0.0;
    for (const auto& [type, w] : d->mixture) {
      if (type != kNoCapability && !config.capabilities.Find(type)) {
        problems.push_back(fmt::format("{}.mixture names unknown capability '{}'",
                                       where, type));
      }
      if (!(w >= 0.0 && w <= 1.0)) {
        problems.push_back(
            fmt::format("{}.mixture.{} must lie in [0, 1]", where, type));
      }
      total += w;
    }
    if (!d->mixture.empty() && std::fabs(total - 1.0) > 1e-9) {
      problems.push_back(
          fmt::format("{}.mixture weights sum to {}, not 1", where, total));
    }
    if (is_source && !d->coefficients.empty()) {
      problems.push_back("source.coefficients must be empty");
    }
    for (const auto& [name, coef] : d->coefficients) {
      if (!config.capabilities.Find(name)) {
        problems.push_back(fmt::format(
            "{}.coefficients names unknown capability '{}'", where, name));
      }
      if (!std::isfinite(coef)) {
        problems.push_back(
            fmt::format("{}.coefficients.{} must be finite", where, name));
      }
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid simulation config:";
    for (const std::string& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
}

SimConfig ParseSimConfig(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ValidationError(fmt::format("line {}: malformed simulation config: {}",
                                      e.mark.line + 1, e.msg));
  }
  if (!root.IsMap()) throw ValidationError("simulation config must be a mapping");

  SimConfig config;
  try {
    if (root["seed"]) config.seed = root["seed"].as<uint64_t>();
    if (const YAML::Node models = root["models"]) {
      RequireMap(models, "models");
      if (models["count"]) {
        const auto count = models["count"].as<long long>();
        if (count < 0) throw ValidationError("models.count must be >= 0");
        config.model_count = static_cast<std::size_t>(count);
      }
      if (models["base_skill"]) {
        const auto range = models["base_skill"].as<std::vector<double>>();
        if (range.size() != 2) {
          throw ValidationError("models.base_skill must be [low, high]");
        }
        config.base_skill_low = range[0];
        config.base_skill_high = range[1];
      }
      if (const YAML::Node sd = models["offset_sd"]) {
        if (sd.IsMap()) {
          config.offset_sd = sd.as<std::map<std::string, double>>();
        } else {
          config.default_offset_sd = sd.as<double>();
        }
      }
    }
    if (root["examples_per_domain"]) {
      config.examples_per_domain =
          root["examples_per_domain"].as<std::size_t>();
    }
    if (const YAML::Node filler = root["filler"]) {
      RequireMap(filler, "filler");
      if (filler["vocabulary"]) {
        config.filler_vocabulary = filler["vocabulary"].as<std::size_t>();
      }
      if (filler["min_tokens"]) {
        config.min_filler_tokens = filler["min_tokens"].as<std::size_t>();
      }
      if (filler["max_tokens"]) {
        config.max_filler_tokens = filler["max_tokens"].as<std::size_t>();
      }
    }
    if (root["observation_noise"]) {
      config.observation_noise = root["observation_noise"].as<double>();
    }
    if (const YAML::Node caps = root["capabilities"]) {
      if (caps.IsScalar() && caps.as<std::string>() == "default") {
        config.capabilities = DefaultCatalog();
      } else if (caps.IsSequence()) {
        Catalog catalog;
        catalog.version = "simulation";
        for (const YAML::Node& c : caps) {
          Capability cap;
          cap.name = c["name"].as<std::string>();
          cap.origin = "simulation";
          cap.instantiation = KeywordRule::FromStrings(
              c["keywords"].as<std::vector<std::string>>());
          catalog.capabilities.push_back(std::move(cap));
        }
        config.capabilities = std::move(catalog);
      } else {
        throw ValidationError(
            "capabilities must be 'default' or a list of {name, keywords}");
      }
    }
    config.source = ParseDomain(root["source"], "source");
    if (const YAML::Node targets = root["targets"]) {
      if (!targets.IsSequence()) {
        throw ValidationError("targets must be a list");
      }
      for (const YAML::Node& t : targets) {
        config.targets.push_back(ParseDomain(t, "target"));
      }
    }
  } catch (const YAML::Exception& e) {
    throw ValidationError(fmt::format("line {}: bad simulation config value: {}",
                                      e.mark.line + 1, e.msg));
  }
  ValidateSimConfig(config);
  return config;
}

SimModels DrawModels(const SimConfig& config) {
  const auto m = static_cast<Eigen::Index>(config.model_count);
  const auto& caps = config.capabilities.capabilities;
  const auto n_caps = static_cast<Eigen::Index>(caps.size());
  const auto n_targets = static_cast<Eigen::Index>(config.targets.size());

  SimModels models;
  models.base_skill.resize(m);
  models.offsets = Eigen::MatrixXd::Zero(m, n_caps);
  models.domain_shift = Eigen::MatrixXd::Zero(m, n_targets);
  Rng rng(DeriveSeed(config.seed, "models"));
  for (Eigen::Index i = 0; i < m; ++i) {
    models.model_ids.push_back(fmt::format("model-{:03d}", i));
    models.base_skill(i) =
        config.base_skill_low +
        (config.base_skill_high - config.base_skill_low) * UniformUnit(rng);
    for (Eigen::Index c = 0; c < n_caps; ++c) {
      const double sd = config.OffsetSd(caps[static_cast<std::size_t>(c)].name);
      models.offsets(i, c) = sd > 0.0 ? Gaussian(rng, 0.0, sd) : 0.0;
    }
    for (Eigen::Index d = 0; d < n_targets; ++d) {
      models.domain_shift(i, d) = config.observation_noise > 0.0
                                      ? Gaussian(rng, 0.0, config.observation_noise)
                                      : 0.0;
    }
  }
  return models;
}

Corpus GenerateCorpus(const SimConfig& config) {
  ValidateSimConfig(config);
  Corpus corpus;
  corpus.source_domain = config.source.name;
  for (const SimDomain& t : config.targets) corpus.target_domains.push_back(t.name);

  for (const SimDomain* domain : AllDomains(config)) {
    const bool is_source = domain == &config.source;
    const std::vector<MixtureEntry> entries = Entries(config, *domain);
    Rng rng(DeriveSeed(config.seed, "corpus:" + domain->name));
    for (std::size_t i = 0; i < config.examples_per_domain; ++i) {
      // Pick the mixture entry.
      const double u = UniformUnit(rng);
      double cumulative = 0.0;
      const MixtureEntry* chosen = &entries.back();
      for (const MixtureEntry& e : entries) {
        cumulative += e.weight;
        if (u < cumulative) {
          chosen = &e;
          break;
        }
      }
      while (chosen->weight == 0.0 && chosen != &entries.front()) --chosen;

      const std::size_t span = config.max_filler_tokens - config.min_filler_tokens;
      const std::size_t n_fill =
          config.min_filler_tokens + UniformIndex(rng, span + 1);
      std::vector<std::string> words;
      words.reserve(n_fill + 1);
      for (std::size_t k = 0; k < n_fill; ++k) {
        words.push_back(
            fmt::format("w{}", UniformIndex(rng, config.filler_vocabulary)));
      }
      if (!chosen->keywords.empty()) {
        const auto& kw =
            chosen->keywords[UniformIndex(rng, chosen->keywords.size())];
        const std::size_t at = UniformIndex(rng, words.size() + 1);
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), kw.text);
      }
      std::string text;
      for (std::size_t k = 0; k < words.size(); ++k) {
        if (k) text.push_back(' ');
        text += words[k];
      }
      text.push_back('.');

      Example ex;
      ex.id = fmt::format("{}-{:05d}", domain->name, i);
      ex.text = std::move(text);
      ex.label = i % 2 == 0 ? Label::kPositive : Label::kNegative;
      ex.domain = domain->name;
      ex.split = is_source ? std::string(kDefaultSplit) : "test";
      corpus.examples.push_back(std::move(ex));
    }
  }
  return corpus;
}

std::vector<PredictionSet> GeneratePredictions(const SimConfig& config,
                                               const Corpus& corpus, int jobs) {
  ValidateSimConfig(config);
  const SimModels models = DrawModels(config);
  const auto& caps = config.capabilities.capabilities;

  std::unordered_map<std::string, int> target_index;
  for (std::size_t d = 0; d < config.targets.size(); ++d) {
    target_index.emplace(config.targets[d].name, static_cast<int>(d));
  }

  // Per example: domain index (-1 for source) and matched capabilities.
  const std::size_t n = corpus.examples.size();
  std::vector<int> domain_of(n);
  std::vector<std::vector<std::size_t>> matched(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Example& e = corpus.examples[i];
    if (e.domain == config.source.name) {
      domain_of[i] = -1;
    } else {
      auto it = target_index.find(e.domain);
      if (it == target_index.end()) {
        throw ValidationError(fmt::format(
            "example '{}' is in domain '{}', unknown to the simulation config",
            e.id, e.domain));
      }
      domain_of[i] = it->second;
    }
  }
  ParallelFor(n, jobs, [&](std::size_t i) {
    const auto tokens = Tokenize(corpus.examples[i].text);
    for (std::size_t c = 0; c < caps.size(); ++c) {
      if (Matches(caps[c].instantiation, tokens)) matched[i].push_back(c);
    }
  });

  std::vector<PredictionSet> out(config.model_count);
  ParallelFor(config.model_count, jobs, [&](std::size_t mi) {
    const auto m = static_cast<Eigen::Index>(mi);
    PredictionSet& set = out[mi];
    set.model_id = models.model_ids[mi];
    set.predictions.reserve(n);
    std::vector<double> domain_term(config.targets.size());
    for (std::size_t d = 0; d < config.targets.size(); ++d) {
      domain_term[d] = CoefficientTerm(config, config.targets[d], models, m) +
                       models.domain_shift(m, static_cast<Eigen::Index>(d));
    }
    Rng rng(DeriveSeed(config.seed, "predictions:" + set.model_id));
    for (std::size_t i = 0; i < n; ++i) {
      double p = models.base_skill(m);
      for (std::size_t c : matched[i]) {
        p += models.offsets(m, static_cast<Eigen::Index>(c));
      }
      if (domain_of[i] >= 0) p += domain_term[static_cast<std::size_t>(domain_of[i])];
      const bool correct = UniformUnit(rng) < Clamp01(p);
      const Label truth = corpus.examples[i].label;
      const Label predicted =
          correct ? truth
                  : (truth == Label::kPositive ? Label::kNegative
                                               : Label::kPositive);
      set.predictions.emplace(corpus.examples[i].id, predicted);
    }
  });
  return out;
}

GroundTruth ComputeGroundTruth(const SimConfig& config) {
  ValidateSimConfig(config);
  const SimModels models = DrawModels(config);
  const auto& caps = config.capabilities.capabilities;
  const auto m = static_cast<Eigen::Index>(config.model_count);

  GroundTruth truth;
  truth.model_ids = models.model_ids;
  truth.capability_names = config.capabilities.Names();

  for (std::size_t di = 0; di <= config.targets.size(); ++di) {
    const bool is_source = di == 0;
    const SimDomain& domain = is_source ? config.source : config.targets[di - 1];
    const std::vector<MixtureEntry> entries = Entries(config, domain);

    std::vector<double> coverage(caps.size(), 0.0);
    for (const MixtureEntry& e : entries) {
      for (const RenderedKeyword& k : e.keywords) {
        const double prob = e.weight / static_cast<double>(e.keywords.size());
        for (std::size_t c : k.matched) coverage[c] += prob;
      }
    }
    for (std::size_t c = 0; c < caps.size(); ++c) {
      truth.coverage[domain.name][caps[c].name] = coverage[c];
    }

    Eigen::VectorXd with_shift(m);
    Eigen::VectorXd structural(m);
    Eigen::MatrixXd slice_sum = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(caps.size()));
    for (Eigen::Index i = 0; i < m; ++i) {
      const double coef = is_source ? 0.0 : CoefficientTerm(config, domain, models, i);
      const double shift =
          is_source ? 0.0 : models.domain_shift(i, static_cast<Eigen::Index>(di - 1));
      double acc = 0.0;
      double acc_structural = 0.0;
      for (const MixtureEntry& e : entries) {
        if (e.keywords.empty()) {
          acc += e.weight * Clamp01(models.base_skill(i) + coef + shift);
          acc_structural += e.weight * Clamp01(models.base_skill(i) + coef);
          continue;
        }
        const double prob = e.weight / static_cast<double>(e.keywords.size());
        for (const RenderedKeyword& k : e.keywords) {
          double p = models.base_skill(i) + coef;
          for (std::size_t c : k.matched) {
            p += models.offsets(i, static_cast<Eigen::Index>(c));
          }
          const double pc = Clamp01(p + shift);
          acc += prob * pc;
          acc_structural += prob * Clamp01(p);
          for (std::size_t c : k.matched) {
            slice_sum(i, static_cast<Eigen::Index>(c)) += prob * pc;
          }
        }
      }
      with_shift(i) = acc;
      structural(i) = acc_structural;
    }

    if (is_source) {
      truth.source_accuracy = with_shift;
      for (std::size_t c = 0; c < caps.size(); ++c) {
        if (coverage[c] <= 0.0) continue;
        truth.slice_accuracy[caps[c].name] =
            slice_sum.col(static_cast<Eigen::Index>(c)) / coverage[c];
      }
    } else {
      truth.target_accuracy[domain.name] = with_shift;
      truth.target_structural[domain.name] = structural;
    }
  }
  return truth;
}

Eigen::VectorXd ExpectedCoefficients(const GroundTruth& truth,
                                     const std::string& target,
                                     const std::vector<std::string>& capabilities) {
  auto y = truth.target_structural.find(target);
  if (y == truth.target_structural.end()) {
    throw ValidationError(fmt::format("no ground truth for target '{}'", target));
  }
  const Eigen::Index m = truth.source_accuracy.size();
  Eigen::MatrixXd design(m, static_cast<Eigen::Index>(capabilities.size()) + 2);
  std::vector<std::string> names{"intercept", "source_accuracy"};
  design.col(0).setOnes();
  design.col(1) = truth.source_accuracy;
  for (std::size_t j = 0; j < capabilities.size(); ++j) {
    auto it = truth.slice_accuracy.find(capabilities[j]);
    if (it == truth.slice_accuracy.end()) {
      throw ValidationError(fmt::format(
          "capability '{}' has no expected slice accuracy", capabilities[j]));
    }
    design.col(static_cast<Eigen::Index>(j) + 2) = it->second;
    names.push_back(capabilities[j]);
  }
  return SolveLeastSquares(design, y->second, names);
}

std::string WriteGroundTruth(const SimConfig& config, const SimModels& models,
                             const GroundTruth& truth) {
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  json root;
  root["seed"] = config.seed;
  root["source_domain"] = config.source.name;
  root["capabilities"] = truth.capability_names;

  json model_list = json::array();
  for (std::size_t i = 0; i < models.model_ids.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    json entry;
    entry["model_id"] = models.model_ids[i];
    entry["base_skill"] = models.base_skill(row);
    json offsets = json::object();
    for (std::size_t c = 0; c < truth.capability_names.size(); ++c) {
      offsets[truth.capability_names[c]] =
          models.offsets(row, static_cast<Eigen::Index>(c));
    }
    entry["offsets"] = offsets;
    json shifts = json::object();
    for (std::size_t d = 0; d < config.targets.size(); ++d) {
      shifts[config.targets[d].name] =
          models.domain_shift(row, static_cast<Eigen::Index>(d));
    }
    entry["domain_shift"] = shifts;
    model_list.push_back(entry);
  }
  root["models"] = model_list;

  json expected;
  expected["source_accuracy"] = vec(truth.source_accuracy);
  json slices = json::object();
  for (const auto& [name, acc] : truth.slice_accuracy) slices[name] = vec(acc);
  expected["slice_accuracy"] = slices;
  json targets = json::object();
  for (const auto& [name, acc] : truth.target_accuracy) targets[name] = vec(acc);
  expected["target_accuracy"] = targets;
  json coverage = json::object();
  for (const auto& [domain, per_cap] : truth.coverage) {
    json row = json::object();
    for (const auto& [cap, value] : per_cap) row[cap] = value;
    coverage[domain] = row;
  }
  expected["coverage"] = coverage;
  root["expected"] = expected;

  // Coefficients over every capability with source coverage; omitted when the
  // expected features are collinear.
  std::vector<std::string> covered;
  for (const auto& [name, acc] : truth.slice_accuracy) {
    (void)acc;
    covered.push_back(name);
  }
  json coefficients = json::object();
  for (const SimDomain& t : config.targets) {
    try {
      const Eigen::VectorXd beta = ExpectedCoefficients(truth, t.name, covered);
      json entry;
      std::vector<std::string> features{"intercept", "source_accuracy"};
      features.insert(features.end(), covered.begin(), covered.end());
      entry["features"] = features;
      entry["coefficients"] = vec(beta);
      coefficients[t.name] = entry;
    } catch (const NumericalError&) {
      coefficients[t.name] = nullptr;
    }
  }
  root["expected_coefficients"] = coefficients;
  return root.dump(2) + "\n";
}

}  // namespace capeval
