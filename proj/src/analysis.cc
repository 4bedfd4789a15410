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

#include "capeval/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include "capeval/errors.h"
#include "capeval/parallel.h"
#include "capeval/random.h"

namespace capeval {
namespace {

Eigen::MatrixXd SelectColumns(const ScoreMatrix& scores,
                              const std::vector<std::string>& names) {
  Eigen::MatrixXd x(scores.features.rows(),
                    static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    x.col(static_cast<Eigen::Index>(j)) = scores.Column(names[j]);
  }
  return x;
}

Eigen::MatrixXd WithSource(const Eigen::VectorXd& source,
                           const Eigen::MatrixXd& extra) {
  Eigen::MatrixXd x(source.size(), extra.cols() + 1);
  x.col(0) = source;
  x.rightCols(extra.cols()) = extra;
  return x;
}

BaselineStats Summarize(const std::vector<RegressionResult>& fits,
                        const std::vector<FTestResult>& tests, double alpha) {
  BaselineStats s;
  s.seeds = fits.size();
  if (fits.empty()) return s;
  std::size_t significant = 0;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    s.mean_adjusted_r2 += fits[i].adjusted_r2;
    s.mean_f_statistic += tests[i].f_statistic;
    s.mean_p_value += tests[i].p_value;
    if (tests[i].p_value < alpha) ++significant;
  }
  const double n = static_cast<double>(fits.size());
  s.mean_adjusted_r2 /= n;
  s.mean_f_statistic /= n;
  s.mean_p_value /= n;
  s.significance_rate = static_cast<double>(significant) / n;
  return s;
}

}  // namespace

CollinearityMode ParseCollinearityMode(std::string_view s) {
  if (s == "fixed_list") return CollinearityMode::kFixedList;
  if (s == "vif") return CollinearityMode::kVif;
  throw ValidationError(fmt::format(
      "unknown collinearity mode '{}' (expected 'fixed_list' or 'vif')", s));
}

std::string_view CollinearityModeName(CollinearityMode mode) {
  return mode == CollinearityMode::kVif ? "vif" : "fixed_list";
}

const std::vector<std::string>& FixedListCapabilities() {
  static const std::vector<std::string> kRetained = {"shifter", "modality",
                                                     "comparative"};
  return kRetained;
}

Eigen::VectorXd VarianceInflationFactors(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::VectorXd vif = Eigen::VectorXd::Ones(p);
  if (p < 2) return vif;
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::MatrixXd design(n, p);
    design.col(0).setOnes();
    Eigen::Index c = 1;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (k != j) design.col(c++) = x.col(k);
    }
    const Eigen::VectorXd y = x.col(j);
    // Column pivoting tolerates exact dependence among the other columns.
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
    const double rss = (y - design * beta).squaredNorm();
    const double tss = (y.array() - y.mean()).matrix().squaredNorm();
    const double r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    vif(j) = r2 >= 1.0 - 1e-12 ? std::numeric_limits<double>::infinity()
                               : 1.0 / (1.0 - r2);
  }
  return vif;
}

CollinearityResult CollinearityFilter(const Eigen::MatrixXd& x,
                                      const std::vector<std::string>& names,
                                      CollinearityMode mode,
                                      double vif_threshold) {
  if (static_cast<std::size_t>(x.cols()) != names.size()) {
    throw ValidationError("collinearity filter: names do not match columns");
  }
  CollinearityResult result;
  if (mode == CollinearityMode::kFixedList) {
    const std::set<std::string> available(names.begin(), names.end());
    const auto& wanted = FixedListCapabilities();
    for (const std::string& w : wanted) {
      if (!available.count(w)) {
        throw ValidationError(fmt::format(
            "fixed_list collinearity mode needs capability '{}'", w));
      }
    }
    const std::set<std::string> keep(wanted.begin(), wanted.end());
    for (const std::string& n : names) {
      (keep.count(n) ? result.retained : result.dropped).push_back(n);
    }
    return result;
  }

  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const double var = (x.col(j).array() - mean).square().sum();
    if (var <= 0.0) {
      const std::string msg = fmt::format(
          "column '{}' has zero variance; dropped before VIF", names[j]);
      spdlog::warn("{}", msg);
      result.warnings.push_back(msg);
      result.dropped.push_back(names[j]);
    } else {
      active.push_back(j);
    }
  }

  for (;;) {
    if (active.size() < 2) break;
    Eigen::MatrixXd sub(x.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      sub.col(static_cast<Eigen::Index>(k)) = x.col(active[k]);
    }
    const Eigen::VectorXd vif = VarianceInflationFactors(sub);
    std::size_t worst = 0;
    for (std::size_t k = 1; k < active.size(); ++k) {
      if (vif(static_cast<Eigen::Index>(k)) >=
          vif(static_cast<Eigen::Index>(worst))) {
        worst = k;
      }
    }
    if (vif(static_cast<Eigen::Index>(worst)) < vif_threshold) break;
    result.dropped.push_back(names[active[worst]]);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  for (Eigen::Index j : active) result.retained.push_back(names[j]);
  return result;
}

std::vector<std::vector<std::vector<std::string>>> RandomSubsetBaseline(
    const std::vector<Example>& pool, const std::vector<std::size_t>& sizes,
    const std::vector<uint64_t>& seeds) {
  for (std::size_t size : sizes) {
    if (size == 0) {
      throw ValidationError("random subset size must be positive");
    }
    if (size > pool.size()) {
      throw ValidationError(fmt::format(
          "random subset size {} exceeds the {} available examples", size,
          pool.size()));
    }
  }
  std::vector<std::vector<std::vector<std::string>>> out;
  out.reserve(seeds.size());
  for (uint64_t seed : seeds) {
    Rng rng(seed);
    std::vector<std::vector<std::string>> draw;
    for (std::size_t size : sizes) {
      std::vector<std::size_t> idx =
          SampleWithoutReplacement(rng, pool.size(), size);
      std::sort(idx.begin(), idx.end());
      std::vector<std::string> ids;
      ids.reserve(size);
      for (std::size_t i : idx) ids.push_back(pool[i].id);
      draw.push_back(std::move(ids));
    }
    out.push_back(std::move(draw));
  }
  return out;
}

std::vector<Eigen::VectorXd> NoiseBaseline(const Eigen::VectorXd& source_acc,
                                           double sigma,
                                           const std::vector<uint64_t>& seeds) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError(
        fmt::format("noise sigma must be positive (got {})", sigma));
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(seeds.size());
  for (uint64_t seed : seeds) {
    Rng rng(seed);
    Eigen::VectorXd noisy(source_acc.size());
    for (Eigen::Index i = 0; i < source_acc.size(); ++i) {
      noisy(i) = std::clamp(source_acc(i) + Gaussian(rng, 0.0, sigma), 0.0, 1.0);
    }
    out.push_back(std::move(noisy));
  }
  return out;
}

double SampleStdDev(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() /
                   static_cast<double>(v.size() - 1));
}

AnalysisConfig ParseAnalysisConfig(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ValidationError(fmt::format("line {}: malformed analysis config: {}",
                                      e.mark.line + 1, e.msg));
  }
  AnalysisConfig config;
  if (!root || root.IsNull()) return config;
  if (!root.IsMap()) throw ValidationError("analysis config must be a mapping");
  static const std::set<std::string> kKnown = {
      "alpha", "seeds", "seed", "noise_sigma", "collinearity",
      "vif_threshold", "retained"};
  try {
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      if (!kKnown.count(key)) {
        throw ValidationError(fmt::format("line {}: unknown key '{}'",
                                          kv.first.Mark().line + 1, key));
      }
    }
    if (root["alpha"]) config.alpha = root["alpha"].as<double>();
    if (root["seeds"]) config.seed_count = root["seeds"].as<std::size_t>();
    if (root["seed"]) config.seed = root["seed"].as<uint64_t>();
    if (root["noise_sigma"]) {
      const auto v = root["noise_sigma"].as<std::string>();
      if (v != "auto") config.noise_sigma = root["noise_sigma"].as<double>();
    }
    if (root["collinearity"]) {
      config.collinearity =
          ParseCollinearityMode(root["collinearity"].as<std::string>());
    }
    if (root["vif_threshold"]) {
      config.vif_threshold = root["vif_threshold"].as<double>();
    }
    if (root["retained"]) {
      config.retained_override =
          root["retained"].as<std::vector<std::string>>();
    }
  } catch (const YAML::Exception& e) {
    throw ValidationError(fmt::format("line {}: bad analysis config value: {}",
                                      e.mark.line + 1, e.msg));
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw ValidationError("alpha must lie in (0, 1)");
  }
  if (config.seed_count == 0) throw ValidationError("seeds must be positive");
  if (config.noise_sigma && !(*config.noise_sigma > 0.0)) {
    throw ValidationError("noise_sigma must be positive or 'auto'");
  }
  if (!(config.vif_threshold > 1.0)) {
    throw ValidationError("vif_threshold must exceed 1");
  }
  return config;
}

std::string WriteAnalysisConfig(const AnalysisConfig& config) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "alpha" << YAML::Value << config.alpha;
  out << YAML::Key << "seeds" << YAML::Value << config.seed_count;
  out << YAML::Key << "seed" << YAML::Value << config.seed;
  out << YAML::Key << "noise_sigma" << YAML::Value;
  if (config.noise_sigma) {
    out << *config.noise_sigma;
  } else {
    out << "auto";
  }
  out << YAML::Key << "collinearity" << YAML::Value
      << std::string(CollinearityModeName(config.collinearity));
  out << YAML::Key << "vif_threshold" << YAML::Value << config.vif_threshold;
  out << YAML::Key << "retained" << YAML::Value << YAML::Flow
      << config.retained_override;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<uint64_t> RandomSubsetSeeds(const AnalysisConfig& config) {
  return SeedSequence(DeriveSeed(config.seed, "random_subsets"),
                      config.seed_count);
}

std::vector<uint64_t> NoiseSeeds(const AnalysisConfig& config) {
  return SeedSequence(DeriveSeed(config.seed, "noise"), config.seed_count);
}

CollinearityResult ResolveRetainedCapabilities(const ScoreMatrix& scores,
                                               const AnalysisConfig& config) {
  const std::vector<std::string> caps = scores.CapabilityNames();
  if (!config.retained_override.empty()) {
    CollinearityResult result;
    const std::set<std::string> keep(config.retained_override.begin(),
                                     config.retained_override.end());
    for (const std::string& name : config.retained_override) {
      if (scores.ColumnIndex(name) < 0) {
        throw ValidationError(
            fmt::format("retained capability '{}' has no score column", name));
      }
    }
    for (const std::string& c : caps) {
      (keep.count(c) ? result.retained : result.dropped).push_back(c);
    }
    return result;
  }
  return CollinearityFilter(SelectColumns(scores, caps), caps,
                            config.collinearity, config.vif_threshold);
}

AnalysisResult RunAnalysis(const ScoreMatrix& scores,
                           const AnalysisConfig& config) {
  ValidateScoreMatrix(scores);
  if (scores.targets.empty()) {
    throw ValidationError("analysis needs at least one target domain");
  }
  AnalysisResult result;
  result.alpha = config.alpha;
  result.model_count = scores.model_ids.size();

  const CollinearityResult retained = ResolveRetainedCapabilities(scores, config);
  if (retained.retained.empty()) {
    throw ValidationError("no capability columns retained for the analysis");
  }
  result.retained = retained.retained;
  result.dropped = retained.dropped;

  const Eigen::VectorXd source = scores.Column(kSourceAccuracy);
  const Eigen::MatrixXd base_x = source;
  std::vector<std::string> cap_names{std::string(kSourceAccuracy)};
  cap_names.insert(cap_names.end(), result.retained.begin(),
                   result.retained.end());
  const Eigen::MatrixXd cap_x = SelectColumns(scores, cap_names);

  std::vector<Eigen::MatrixXd> random_x;
  for (const auto& group : scores.RandomSubsetGroups()) {
    if (group.empty()) continue;
    random_x.push_back(WithSource(source, SelectColumns(scores, group)));
  }
  result.random_seed_count = random_x.size();

  result.noise_sigma = config.noise_sigma.value_or(SampleStdDev(source));
  if (!(result.noise_sigma > 0.0)) {
    throw NumericalError(
        "source accuracies have zero spread; set noise_sigma explicitly");
  }
  std::vector<Eigen::MatrixXd> noise_x;
  for (const Eigen::VectorXd& noisy :
       NoiseBaseline(source, result.noise_sigma, NoiseSeeds(config))) {
    noise_x.push_back(WithSource(source, noisy));
  }
  result.noise_seed_count = noise_x.size();

  result.domains.resize(scores.targets.size());
  for (std::size_t d = 0; d < scores.targets.size(); ++d) {
    const auto& [domain, y] = scores.targets[d];
    DomainAnalysis& out = result.domains[d];
    out.domain = domain;

    const RegressionResult base =
        FitOls(base_x, y, true, {std::string(kSourceAccuracy)});
    const RegressionResult with_caps = FitOls(cap_x, y, true, cap_names);
    out.baseline_adjusted_r2 = base.adjusted_r2;
    out.capability_adjusted_r2 = with_caps.adjusted_r2;
    out.capability_test = NestedFTest(base, with_caps);
    out.significant = out.capability_test.p_value < config.alpha;

    auto run_seeds = [&](const std::vector<Eigen::MatrixXd>& designs) {
      std::vector<RegressionResult> fits(designs.size());
      std::vector<FTestResult> tests(designs.size());
      ParallelFor(designs.size(), config.jobs, [&](std::size_t s) {
        fits[s] = FitOls(designs[s], y, true);
        tests[s] = NestedFTest(base, fits[s]);
      });
      return Summarize(fits, tests, config.alpha);
    };
    if (!random_x.empty()) out.random_subset = run_seeds(random_x);
    out.noise = run_seeds(noise_x);
  }
  return result;
}

}  // namespace capeval
