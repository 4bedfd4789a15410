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

#include "capeval/report.h"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "capeval/errors.h"
#include "capeval/io.h"
#include "json.hpp"

namespace capeval {
namespace {

using json = nlohmann::ordered_json;

// JSON has no infinity; perfect fits store F as null.
json Number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double ReadNumber(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

json ToJson(const BaselineStats& s) {
  return {{"mean_adjusted_r2", s.mean_adjusted_r2},
          {"mean_f_statistic", Number(s.mean_f_statistic)},
          {"mean_p_value", s.mean_p_value},
          {"significance_rate", s.significance_rate},
          {"seeds", s.seeds}};
}

BaselineStats BaselineFromJson(const json& j) {
  BaselineStats s;
  s.mean_adjusted_r2 = j.at("mean_adjusted_r2").get<double>();
  s.mean_f_statistic = ReadNumber(j.at("mean_f_statistic"));
  s.mean_p_value = j.at("mean_p_value").get<double>();
  s.significance_rate = j.at("significance_rate").get<double>();
  s.seeds = j.at("seeds").get<std::size_t>();
  return s;
}

json ToJson(const AnalysisResult& a) {
  json domains = json::array();
  for (const DomainAnalysis& d : a.domains) {
    json entry = {
        {"domain", d.domain},
        {"baseline_adjusted_r2", d.baseline_adjusted_r2},
        {"capability_adjusted_r2", d.capability_adjusted_r2},
        {"f_statistic", Number(d.capability_test.f_statistic)},
        {"df_numerator", d.capability_test.df_numerator},
        {"df_denominator", d.capability_test.df_denominator},
        {"p_value", d.capability_test.p_value},
        {"perfect_fit", d.capability_test.perfect_fit},
        {"significant", d.significant},
        {"random_subset", d.random_subset ? ToJson(*d.random_subset) : json()},
        {"noise", ToJson(d.noise)},
    };
    domains.push_back(entry);
  }
  return {{"alpha", a.alpha},
          {"noise_sigma", a.noise_sigma},
          {"noise_seed_count", a.noise_seed_count},
          {"random_seed_count", a.random_seed_count},
          {"model_count", a.model_count},
          {"retained", a.retained},
          {"dropped", a.dropped},
          {"domains", domains}};
}

AnalysisResult AnalysisFromJson(const json& j) {
  AnalysisResult a;
  a.alpha = j.at("alpha").get<double>();
  a.noise_sigma = j.at("noise_sigma").get<double>();
  a.noise_seed_count = j.at("noise_seed_count").get<std::size_t>();
  a.random_seed_count = j.at("random_seed_count").get<std::size_t>();
  a.model_count = j.at("model_count").get<std::size_t>();
  a.retained = j.at("retained").get<std::vector<std::string>>();
  a.dropped = j.at("dropped").get<std::vector<std::string>>();
  for (const json& e : j.at("domains")) {
    DomainAnalysis d;
    d.domain = e.at("domain").get<std::string>();
    d.baseline_adjusted_r2 = e.at("baseline_adjusted_r2").get<double>();
    d.capability_adjusted_r2 = e.at("capability_adjusted_r2").get<double>();
    d.capability_test.f_statistic = ReadNumber(e.at("f_statistic"));
    d.capability_test.df_numerator = e.at("df_numerator").get<std::size_t>();
    d.capability_test.df_denominator = e.at("df_denominator").get<std::size_t>();
    d.capability_test.p_value = e.at("p_value").get<double>();
    d.capability_test.perfect_fit = e.at("perfect_fit").get<bool>();
    d.significant = e.at("significant").get<bool>();
    if (!e.at("random_subset").is_null()) {
      d.random_subset = BaselineFromJson(e.at("random_subset"));
    }
    d.noise = BaselineFromJson(e.at("noise"));
    a.domains.push_back(std::move(d));
  }
  return a;
}

std::string Fixed(double v) {
  if (!std::isfinite(v)) return "inf";
  return fmt::format("{:.4f}", v);
}

std::string PValue(double p) { return fmt::format("{:.3g}", p); }

std::string Round(double v) {
  if (!std::isfinite(v)) return "inf";
  return fmt::format("{}", v);
}

}  // namespace

std::vector<SliceSummary> SummarizeSlices(const std::vector<Slice>& slices) {
  std::vector<SliceSummary> out;
  out.reserve(slices.size());
  for (const Slice& s : slices) {
    out.push_back({s.capability_name, s.member_ids.size(), s.total, s.coverage()});
  }
  return out;
}

std::string ConfigHash(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string SerializeReport(const Report& report) {
  json root;
  root["config_hash"] = report.config_hash;
  root["analysis_seed"] = report.analysis_seed;
  root["split_seed"] = report.split_seed ? json(*report.split_seed) : json();
  root["split"] = report.split;
  json slices = json::array();
  for (const SliceSummary& s : report.slices) {
    slices.push_back({{"capability", s.capability},
                      {"members", s.members},
                      {"total", s.total},
                      {"coverage", s.coverage}});
  }
  root["slices"] = slices;
  root["analysis"] = report.analysis ? ToJson(*report.analysis) : json();
  json distances = json::array();
  for (const DomainDistance& d : report.distances) {
    distances.push_back({{"source", d.source},
                         {"target", d.target},
                         {"classifier_error", d.classifier_error},
                         {"proxy_a_distance", d.proxy_a_distance}});
  }
  root["distances"] = distances;
  if (report.improvement) {
    json points = json::array();
    for (const ImprovementPoint& p : report.improvement->points) {
      points.push_back({{"domain", p.domain},
                        {"proxy_a_distance", p.proxy_a_distance},
                        {"improvement", p.improvement}});
    }
    root["improvement"] = {{"intercept", report.improvement->intercept},
                           {"slope", report.improvement->slope},
                           {"points", points}};
  } else {
    root["improvement"] = nullptr;
  }
  root["notices"] = report.notices;
  return root.dump(2) + "\n";
}

Report ParseReport(std::string_view json_text) {
  Report report;
  try {
    const json root = json::parse(json_text);
    report.config_hash = root.at("config_hash").get<std::string>();
    report.analysis_seed = root.at("analysis_seed").get<uint64_t>();
    if (!root.at("split_seed").is_null()) {
      report.split_seed = root.at("split_seed").get<uint64_t>();
    }
    report.split = root.at("split").get<std::string>();
    for (const json& s : root.at("slices")) {
      report.slices.push_back({s.at("capability").get<std::string>(),
                               s.at("members").get<std::size_t>(),
                               s.at("total").get<std::size_t>(),
                               s.at("coverage").get<double>()});
    }
    if (!root.at("analysis").is_null()) {
      report.analysis = AnalysisFromJson(root.at("analysis"));
    }
    for (const json& d : root.at("distances")) {
      report.distances.push_back({d.at("source").get<std::string>(),
                                  d.at("target").get<std::string>(),
                                  d.at("classifier_error").get<double>(),
                                  d.at("proxy_a_distance").get<double>()});
    }
    if (!root.at("improvement").is_null()) {
      const json& imp = root.at("improvement");
      ImprovementFit fit;
      fit.intercept = imp.at("intercept").get<double>();
      fit.slope = imp.at("slope").get<double>();
      for (const json& p : imp.at("points")) {
        fit.points.push_back({p.at("domain").get<std::string>(),
                              p.at("proxy_a_distance").get<double>(),
                              p.at("improvement").get<double>()});
      }
      report.improvement = fit;
    }
    report.notices = root.at("notices").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("malformed results file: {}", e.what()));
  }
  return report;
}

std::string RenderSliceTable(const std::vector<SliceSummary>& slices) {
  std::string out = "| capability | members | total | coverage |\n";
  out += "|---|---:|---:|---:|\n";
  for (const SliceSummary& s : slices) {
    out += fmt::format("| {} | {} | {} | {:.1f}% |\n", s.capability, s.members,
                       s.total, 100.0 * s.coverage);
  }
  return out;
}

std::string RenderMarkdown(const Report& report) {
  std::string out = "# Capability evaluation report\n\n";
  out += fmt::format("- config hash: `{}`\n", report.config_hash);
  out += fmt::format("- analysis seed: {}\n", report.analysis_seed);
  if (report.split_seed) {
    out += fmt::format("- domain split seed: {}\n", *report.split_seed);
  }
  if (!report.split.empty()) {
    out += fmt::format("- sliced split: {}\n", report.split);
  }
  out += "\n";

  if (!report.slices.empty()) {
    out += "## Capability test suites\n\n";
    out += RenderSliceTable(report.slices);
    out += "\n";
  }

  if (report.analysis) {
    const AnalysisResult& a = *report.analysis;
    out += "## Generalizability analysis\n\n";
    out += fmt::format("- models: {}\n", a.model_count);
    out += fmt::format("- alpha: {}\n", a.alpha);
    out += fmt::format("- retained capabilities: {}\n",
                       fmt::join(a.retained, ", "));
    out += fmt::format("- dropped capabilities: {}\n",
                       a.dropped.empty() ? std::string("none")
                                         : fmt::format("{}", fmt::join(a.dropped, ", ")));
    out += fmt::format("- random-subset seeds: {}\n", a.random_seed_count);
    out += fmt::format("- noise seeds: {} (sigma {})\n\n", a.noise_seed_count,
                       Fixed(a.noise_sigma));

    for (const DomainAnalysis& d : a.domains) {
      out += fmt::format("### {}\n\n", d.domain);
      out += "| setting | adjusted R^2 | F | p | significant |\n";
      out += "|---|---:|---:|---:|---|\n";
      out += fmt::format("| source accuracy only | {} | | | |\n",
                         Fixed(d.baseline_adjusted_r2));
      out += fmt::format("| + capabilities | {} | {} | {} | {} |\n",
                         Fixed(d.capability_adjusted_r2),
                         Fixed(d.capability_test.f_statistic),
                         PValue(d.capability_test.p_value),
                         d.significant ? "yes" : "no");
      if (d.random_subset) {
        out += fmt::format(
            "| + random subsets (mean of {}) | {} | {} | {} | {:.0f}% of seeds |\n",
            d.random_subset->seeds, Fixed(d.random_subset->mean_adjusted_r2),
            Fixed(d.random_subset->mean_f_statistic),
            PValue(d.random_subset->mean_p_value),
            100.0 * d.random_subset->significance_rate);
      }
      out += fmt::format(
          "| + noisy accuracy (mean of {}) | {} | {} | {} | {:.0f}% of seeds |\n\n",
          d.noise.seeds, Fixed(d.noise.mean_adjusted_r2),
          Fixed(d.noise.mean_f_statistic), PValue(d.noise.mean_p_value),
          100.0 * d.noise.significance_rate);
    }

    out += "## Adjusted R^2 by setting\n\n";
    out += "| domain | source only | + capabilities | + random subsets | + "
           "noisy accuracy |\n";
    out += "|---|---:|---:|---:|---:|\n";
    double sums[4] = {0, 0, 0, 0};
    std::size_t random_count = 0;
    for (const DomainAnalysis& d : a.domains) {
      out += fmt::format("| {} | {} | {} | {} | {} |\n", d.domain,
                         Fixed(d.baseline_adjusted_r2),
                         Fixed(d.capability_adjusted_r2),
                         d.random_subset ? Fixed(d.random_subset->mean_adjusted_r2)
                                         : std::string("n/a"),
                         Fixed(d.noise.mean_adjusted_r2));
      sums[0] += d.baseline_adjusted_r2;
      sums[1] += d.capability_adjusted_r2;
      if (d.random_subset) {
        sums[2] += d.random_subset->mean_adjusted_r2;
        ++random_count;
      }
      sums[3] += d.noise.mean_adjusted_r2;
    }
    const double n = static_cast<double>(a.domains.size());
    out += fmt::format("| **mean** | {} | {} | {} | {} |\n\n", Fixed(sums[0] / n),
                       Fixed(sums[1] / n),
                       random_count ? Fixed(sums[2] / static_cast<double>(random_count))
                                    : std::string("n/a"),
                       Fixed(sums[3] / n));
    std::size_t significant = 0;
    for (const DomainAnalysis& d : a.domains) significant += d.significant;
    out += fmt::format(
        "Capabilities add a significant signal (p < {}) on {}/{} target "
        "domains.\n\n",
        a.alpha, significant, a.domains.size());
  }

  if (!report.distances.empty()) {
    out += "## Domain distance\n\n";
    out += "| target | classifier error | proxy A-distance |\n";
    out += "|---|---:|---:|\n";
    for (const DomainDistance& d : report.distances) {
      out += fmt::format("| {} | {} | {} |\n", d.target,
                         Fixed(d.classifier_error), Fixed(d.proxy_a_distance));
    }
    out += "\n";
  }

  if (report.improvement) {
    out += "## Improvement vs. distance\n\n";
    const double slope = report.improvement->slope;
    out += fmt::format("Fitted line: improvement = {} {} {} * distance\n\n",
                       Fixed(report.improvement->intercept),
                       std::signbit(slope) ? '-' : '+', Fixed(std::fabs(slope)));
    out += "| target | proxy A-distance | adjusted R^2 improvement |\n";
    out += "|---|---:|---:|\n";
    for (const ImprovementPoint& p : report.improvement->points) {
      out += fmt::format("| {} | {} | {} |\n", p.domain,
                         Fixed(p.proxy_a_distance), Fixed(p.improvement));
    }
    out += "\n";
  }

  if (!report.notices.empty()) {
    out += "## Notices\n\n";
    for (const std::string& n : report.notices) out += "- " + n + "\n";
    out += "\n";
  }
  return out;
}

std::map<std::string, std::string> RenderCsv(const Report& report) {
  std::map<std::string, std::string> files;
  if (!report.slices.empty()) {
    std::string csv = CsvRow({"capability", "members", "total", "coverage"});
    for (const SliceSummary& s : report.slices) {
      csv += CsvRow({s.capability, std::to_string(s.members),
                     std::to_string(s.total), Round(s.coverage)});
    }
    files["capabilities.csv"] = csv;
  }
  if (report.analysis) {
    std::string csv = CsvRow({"domain", "setting", "adjusted_r2", "f_statistic",
                              "p_value", "significant", "significance_rate",
                              "seeds"});
    std::string comparison =
        CsvRow({"domain", "source_only", "capabilities", "random_subsets",
                "noisy_accuracy"});
    for (const DomainAnalysis& d : report.analysis->domains) {
      csv += CsvRow({d.domain, "source_only", Round(d.baseline_adjusted_r2), "",
                     "", "", "", ""});
      csv += CsvRow({d.domain, "capabilities", Round(d.capability_adjusted_r2),
                     Round(d.capability_test.f_statistic),
                     Round(d.capability_test.p_value),
                     d.significant ? "true" : "false", "", "1"});
      if (d.random_subset) {
        csv += CsvRow({d.domain, "random_subsets",
                       Round(d.random_subset->mean_adjusted_r2),
                       Round(d.random_subset->mean_f_statistic),
                       Round(d.random_subset->mean_p_value), "",
                       Round(d.random_subset->significance_rate),
                       std::to_string(d.random_subset->seeds)});
      }
      csv += CsvRow({d.domain, "noisy_accuracy", Round(d.noise.mean_adjusted_r2),
                     Round(d.noise.mean_f_statistic),
                     Round(d.noise.mean_p_value), "",
                     Round(d.noise.significance_rate),
                     std::to_string(d.noise.seeds)});
      comparison += CsvRow(
          {d.domain, Round(d.baseline_adjusted_r2), Round(d.capability_adjusted_r2),
           d.random_subset ? Round(d.random_subset->mean_adjusted_r2) : "",
           Round(d.noise.mean_adjusted_r2)});
    }
    files["analysis.csv"] = csv;
    files["comparison.csv"] = comparison;
  }
  if (!report.distances.empty()) {
    std::string csv =
        CsvRow({"source", "target", "classifier_error", "proxy_a_distance"});
    for (const DomainDistance& d : report.distances) {
      csv += CsvRow({d.source, d.target, Round(d.classifier_error),
                     Round(d.proxy_a_distance)});
    }
    files["distances.csv"] = csv;
  }
  if (report.improvement) {
    std::string scatter = CsvRow({"domain", "proxy_a_distance", "improvement"});
    for (const ImprovementPoint& p : report.improvement->points) {
      scatter += CsvRow({p.domain, Round(p.proxy_a_distance), Round(p.improvement)});
    }
    files["improvement_scatter.csv"] = scatter;
    files["improvement_fit.csv"] =
        CsvRow({"intercept", "slope"}) +
        CsvRow({Round(report.improvement->intercept),
                Round(report.improvement->slope)});
  }
  return files;
}

void WriteReport(const Report& report, const std::filesystem::path& dir) {
  WriteFileAtomic(dir / "results.json", SerializeReport(report));
  WriteFileAtomic(dir / "report.md", RenderMarkdown(report));
  for (const auto& [name, content] : RenderCsv(report)) {
    WriteFileAtomic(dir / name, content);
  }
}

}  // namespace capeval
