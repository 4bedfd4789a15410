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

// capeval: slice, score, analyze and simulate capability-based evaluation.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "capeval/analysis.h"
#include "capeval/catalog.h"
#include "capeval/corpus.h"
#include "capeval/distance.h"
#include "capeval/errors.h"
#include "capeval/evaluation.h"
#include "capeval/io.h"
#include "capeval/pipeline.h"
#include "capeval/random.h"
#include "capeval/report.h"
#include "capeval/simulator.h"
#include "capeval/slicer.h"

namespace fs = std::filesystem;

namespace capeval {
namespace {

constexpr const char* kConfigDirEnv = "CAPEVAL_CONFIG_DIR";

// Relative config paths that do not exist locally are looked up in
// $CAPEVAL_CONFIG_DIR.
fs::path ResolveConfig(const std::string& path) {
  fs::path p(path);
  if (p.is_absolute() || fs::exists(p)) return p;
  if (const char* dir = std::getenv(kConfigDirEnv); dir && *dir) {
    fs::path candidate = fs::path(dir) / p;
    if (fs::exists(candidate)) return candidate;
  }
  return p;
}

// Explicit --catalog, else $CAPEVAL_CONFIG_DIR/catalog.yaml, else built-in.
Catalog LoadCatalogOption(const std::string& path, std::string* text) {
  fs::path chosen;
  if (!path.empty()) {
    chosen = ResolveConfig(path);
  } else if (const char* dir = std::getenv(kConfigDirEnv); dir && *dir) {
    fs::path candidate = fs::path(dir) / "catalog.yaml";
    if (fs::exists(candidate)) chosen = candidate;
  }
  Catalog catalog = chosen.empty() ? DefaultCatalog() : ParseCatalog(chosen);
  if (text) *text = WriteCatalog(catalog);
  return catalog;
}

struct CorpusArgs {
  std::string path;
  std::string source;
  std::vector<std::string> targets;
  bool balance = false;
};

void AddCorpusOptions(CLI::App* cmd, CorpusArgs& args) {
  cmd->add_option("--corpus", args.path, "corpus file (JSON lines)")->required();
  cmd->add_option("--source", args.source, "source domain name")->required();
  cmd->add_option("--targets", args.targets,
                  "target domains (default: every other domain)")
      ->delimiter(',');
  cmd->add_flag("--balance", args.balance,
                "downsample each domain to balanced classes");
}

Corpus LoadCorpusArgs(const CorpusArgs& args, uint64_t seed) {
  LoadReport load;
  Corpus corpus = LoadCorpus(args.path, args.source, args.targets, &load);
  if (args.targets.empty()) {
    std::set<std::string> seen{corpus.source_domain};
    for (const Example& e : corpus.examples) {
      if (seen.insert(e.domain).second) corpus.target_domains.push_back(e.domain);
    }
  }
  if (load.dropped_neutral > 0) {
    spdlog::info("dropped {} neutral (rating 3) records", load.dropped_neutral);
  }
  if (args.balance) {
    corpus.examples =
        BalanceByDomain(corpus.examples, DeriveSeed(seed, "balance"), std::nullopt);
  }
  ValidateCorpus(corpus);
  spdlog::info("loaded {} examples; source '{}', {} target domain(s)",
               corpus.examples.size(), corpus.source_domain,
               corpus.target_domains.size());
  return corpus;
}

struct AnalysisArgs {
  std::string config;
  std::optional<double> alpha;
  std::optional<std::size_t> seeds;
  std::optional<std::string> collinearity;
};

void AddAnalysisOptions(CLI::App* cmd, AnalysisArgs& args) {
  cmd->add_option("--config", args.config, "analysis config (YAML)");
  cmd->add_option("--alpha", args.alpha, "significance level")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seeds", args.seeds, "number of baseline seeds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--collinearity", args.collinearity, "fixed_list or vif");
}

AnalysisConfig BuildAnalysisConfig(const AnalysisArgs& args, uint64_t seed,
                                   int jobs) {
  AnalysisConfig config;
  if (!args.config.empty()) {
    config = ParseAnalysisConfig(ReadFile(ResolveConfig(args.config)));
  }
  if (args.alpha) config.alpha = *args.alpha;
  if (args.seeds) config.seed_count = *args.seeds;
  if (args.collinearity) config.collinearity = ParseCollinearityMode(*args.collinearity);
  config.seed = seed;
  config.jobs = jobs;
  return config;
}

void PrintSummary(const Report& report, const fs::path& out) {
  if (report.analysis) {
    std::size_t significant = 0;
    for (const DomainAnalysis& d : report.analysis->domains) {
      significant += d.significant;
    }
    fmt::print("capabilities significant on {}/{} target domains (alpha {})\n",
               significant, report.analysis->domains.size(),
               report.analysis->alpha);
  }
  if (report.improvement) {
    fmt::print("improvement vs distance slope: {:.4f}\n", report.improvement->slope);
  }
  for (const std::string& n : report.notices) fmt::print("note: {}\n", n);
  fmt::print("report written to {}\n", (out / "report.md").string());
}

int Run(int argc, char** argv) {
  CLI::App app{"Capability-based evaluation of text classifiers"};
  app.require_subcommand(1);
  int jobs = 1;
  uint64_t seed = 0;
  bool quiet = false;
  app.add_option("--jobs,-j", jobs, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_flag("--quiet,-q", quiet, "only log warnings and errors");

  // catalog
  CLI::App* catalog_cmd = app.add_subcommand("catalog", "inspect catalogs");
  catalog_cmd->require_subcommand(1);
  std::string validate_path;
  CLI::App* validate_cmd =
      catalog_cmd->add_subcommand("validate", "check a catalog file");
  validate_cmd->add_option("path", validate_path, "catalog YAML")->required();
  std::string default_out;
  CLI::App* default_cmd =
      catalog_cmd->add_subcommand("default", "emit the built-in catalog");
  default_cmd->add_option("--out", default_out, "write to file instead of stdout");

  // slice
  CLI::App* slice_cmd = app.add_subcommand("slice", "build capability test suites");
  CorpusArgs slice_corpus;
  std::string slice_catalog, slice_out, slice_split = "validation";
  AddCorpusOptions(slice_cmd, slice_corpus);
  slice_cmd->add_option("--catalog", slice_catalog, "catalog YAML");
  slice_cmd->add_option("--split", slice_split, "validation or all")
      ->capture_default_str();
  slice_cmd->add_option("--out", slice_out, "output directory")->required();

  // evaluate
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "score models per slice");
  CorpusArgs eval_corpus;
  AnalysisArgs eval_analysis;
  std::string eval_catalog, eval_preds, eval_out, eval_split = "validation";
  bool eval_no_random = false;
  AddCorpusOptions(eval_cmd, eval_corpus);
  AddAnalysisOptions(eval_cmd, eval_analysis);
  eval_cmd->add_option("--catalog", eval_catalog, "catalog YAML");
  eval_cmd->add_option("--predictions", eval_preds, "predictions file")->required();
  eval_cmd->add_option("--split", eval_split, "validation or all")
      ->capture_default_str();
  eval_cmd->add_flag("--no-random-subsets", eval_no_random,
                     "skip the random-subset baseline columns");
  eval_cmd->add_option("--out", eval_out, "output directory")->required();

  // analyze
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "fit the generalizability models");
  CorpusArgs an_corpus;
  AnalysisArgs an_analysis;
  std::string an_scores, an_distances, an_catalog, an_preds, an_out,
      an_split = "validation";
  bool an_no_distance = false;
  ClassifierOptions an_classifier;
  analyze_cmd->add_option("--scores", an_scores,
                          "score directory from `evaluate` (skips slicing)");
  analyze_cmd->add_option("--distances", an_distances,
                          "distances.csv from `distance` (with --scores)");
  analyze_cmd->add_option("--corpus", an_corpus.path, "corpus file");
  analyze_cmd->add_option("--source", an_corpus.source, "source domain");
  analyze_cmd->add_option("--targets", an_corpus.targets, "target domains")
      ->delimiter(',');
  analyze_cmd->add_flag("--balance", an_corpus.balance,
                        "downsample each domain to balanced classes");
  analyze_cmd->add_option("--predictions", an_preds, "predictions file");
  analyze_cmd->add_option("--catalog", an_catalog, "catalog YAML");
  analyze_cmd->add_option("--split", an_split, "validation or all")
      ->capture_default_str();
  analyze_cmd->add_flag("--no-distance", an_no_distance,
                        "skip the domain classifier");
  analyze_cmd->add_option("--iterations", an_classifier.iterations,
                          "domain classifier iterations")
      ->capture_default_str();
  AddAnalysisOptions(analyze_cmd, an_analysis);
  analyze_cmd->add_option("--out", an_out, "report directory")->required();

  // distance
  CLI::App* distance_cmd =
      app.add_subcommand("distance", "proxy A-distance per target domain");
  CorpusArgs dist_corpus;
  ClassifierOptions dist_classifier;
  std::string dist_out;
  AddCorpusOptions(distance_cmd, dist_corpus);
  distance_cmd->add_option("--iterations", dist_classifier.iterations,
                           "gradient descent iterations")
      ->capture_default_str();
  distance_cmd->add_option("--vocab", dist_classifier.vocab_size,
                           "bag-of-words vocabulary size")
      ->capture_default_str();
  distance_cmd->add_option("--out", dist_out, "output directory")->required();

  // simulate
  CLI::App* sim_cmd = app.add_subcommand("simulate", "generate a synthetic study");
  std::string sim_config, sim_out;
  std::optional<std::size_t> sim_models;
  sim_cmd->add_option("--config", sim_config, "simulation config (YAML)")
      ->required();
  sim_cmd->add_option("--models", sim_models, "override the model count");
  sim_cmd->add_option("--out", sim_out, "output directory")->required();

  // report
  CLI::App* report_cmd = app.add_subcommand("report", "re-render a results file");
  std::string report_results, report_out;
  report_cmd->add_option("--results", report_results, "results.json")->required();
  report_cmd->add_option("--out", report_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto logger = spdlog::stderr_color_mt("capeval");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);

  if (*validate_cmd) {
    const Catalog catalog = ParseCatalog(ResolveConfig(validate_path));
    fmt::print("ok: {} capabilities (version {})\n", catalog.capabilities.size(),
               catalog.version);
    for (const Capability& c : catalog.capabilities) {
      fmt::print("  {}: {}\n", c.name, fmt::join(c.instantiation.Texts(), ", "));
    }
    return 0;
  }
  if (*default_cmd) {
    const std::string text = WriteCatalog(DefaultCatalog());
    if (default_out.empty()) {
      std::cout << text;
    } else {
      WriteFileAtomic(default_out, text);
    }
    return 0;
  }

  if (*slice_cmd) {
    const Catalog catalog = LoadCatalogOption(slice_catalog, nullptr);
    const Corpus corpus = LoadCorpusArgs(slice_corpus, seed);
    const SplitMode split = ParseSplitMode(slice_split);
    const std::vector<Slice> slices = SliceSource(catalog, corpus, split, jobs);
    const fs::path out(slice_out);
    for (const Slice& s : slices) {
      WriteFileAtomic(out / (SafeFileName(s.capability_name) + ".txt"),
                      WriteSliceMembers(s));
      spdlog::info("{}: {} of {} examples ({:.1f}%)", s.capability_name,
                   s.member_ids.size(), s.total, 100.0 * s.coverage());
    }
    Report report;
    report.config_hash = ConfigHash(WriteCatalog(catalog));
    report.analysis_seed = seed;
    report.split = std::string(slice_split);
    report.slices = SummarizeSlices(slices);
    const auto csv = RenderCsv(report);
    WriteFileAtomic(out / "summary.csv", csv.at("capabilities.csv"));
    WriteFileAtomic(out / "summary.md", RenderSliceTable(report.slices));
    fmt::print("{}", RenderSliceTable(report.slices));
    return 0;
  }

  if (*eval_cmd) {
    const Catalog catalog = LoadCatalogOption(eval_catalog, nullptr);
    const Corpus corpus = LoadCorpusArgs(eval_corpus, seed);
    const auto preds = LoadPredictions(eval_preds);
    const SplitMode split = ParseSplitMode(eval_split);
    const AnalysisConfig config = BuildAnalysisConfig(eval_analysis, seed, jobs);
    const auto slices = SliceSource(catalog, corpus, split, jobs);
    const ScoreMatrix scores =
        ScoreWithBaselines(preds, corpus, slices, config, split, !eval_no_random);
    WriteScoreMatrix(scores, eval_out);
    fmt::print("scored {} models on {} features and {} target domains\n",
               scores.model_ids.size(), scores.feature_names.size(),
               scores.targets.size());
    return 0;
  }

  if (*analyze_cmd) {
    const AnalysisConfig config = BuildAnalysisConfig(an_analysis, seed, jobs);
    const fs::path out(an_out);
    Report report;
    if (!an_scores.empty()) {
      const ScoreMatrix scores = ReadScoreMatrix(an_scores);
      std::vector<DomainDistance> distances;
      if (!an_distances.empty()) distances = ParseDistancesCsv(ReadFile(an_distances));
      report = AnalysisReport(RunAnalysis(scores, config), distances, seed,
                              WriteAnalysisConfig(config));
    } else {
      if (an_corpus.path.empty() || an_corpus.source.empty() || an_preds.empty()) {
        throw ValidationError(
            "analyze needs --scores, or --corpus, --source and --predictions");
      }
      std::string catalog_text;
      const Catalog catalog = LoadCatalogOption(an_catalog, &catalog_text);
      const Corpus corpus = LoadCorpusArgs(an_corpus, seed);
      const auto preds = LoadPredictions(an_preds);
      PipelineOptions options;
      options.analysis = config;
      options.split = ParseSplitMode(an_split);
      options.distances = !an_no_distance;
      options.classifier = an_classifier;
      options.config_text = WriteAnalysisConfig(config) + catalog_text +
                            fmt::format("split: {}\niterations: {}\n", an_split,
                                        an_classifier.iterations);
      report = RunPipeline(catalog, corpus, preds, options).report;
    }
    WriteReport(report, out);
    PrintSummary(report, out);
    return 0;
  }

  if (*distance_cmd) {
    const Corpus corpus = LoadCorpusArgs(dist_corpus, seed);
    Report report;
    report.config_hash = ConfigHash(fmt::format(
        "iterations: {}\nvocab: {}\n", dist_classifier.iterations,
        dist_classifier.vocab_size));
    report.analysis_seed = seed;
    report.split_seed = seed;
    report.distances = ComputeDomainDistances(corpus, seed, dist_classifier, jobs);
    WriteReport(report, dist_out);
    for (const DomainDistance& d : report.distances) {
      fmt::print("{} -> {}: error {:.4f}, proxy A-distance {:.4f}\n", d.source,
                 d.target, d.classifier_error, d.proxy_a_distance);
    }
    return 0;
  }

  if (*sim_cmd) {
    SimConfig config = ParseSimConfig(ReadFile(ResolveConfig(sim_config)));
    if (sim_models) config.model_count = *sim_models;
    ValidateSimConfig(config);
    const fs::path out(sim_out);
    const Corpus corpus = GenerateCorpus(config);
    const auto preds = GeneratePredictions(config, corpus, jobs);
    std::vector<std::string> order;
    order.reserve(corpus.examples.size());
    for (const Example& e : corpus.examples) order.push_back(e.id);
    WriteFileAtomic(out / "corpus.jsonl", WriteCorpusRecords(corpus.examples));
    WriteFileAtomic(out / "predictions.jsonl", WritePredictionRecords(preds, order));
    WriteFileAtomic(out / "ground_truth.json",
                    WriteGroundTruth(config, DrawModels(config),
                                     ComputeGroundTruth(config)));
    fmt::print("simulated {} models, {} examples; source '{}', targets {}\n",
               preds.size(), corpus.examples.size(), corpus.source_domain,
               fmt::join(corpus.target_domains, ","));
    return 0;
  }

  if (*report_cmd) {
    const Report report = ParseReport(ReadFile(report_results));
    WriteReport(report, report_out);
    PrintSummary(report, report_out);
    return 0;
  }
  return 0;
}

}  // namespace
}  // namespace capeval

int main(int argc, char** argv) {
  try {
    return capeval::Run(argc, argv);
  } catch (const capeval::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
