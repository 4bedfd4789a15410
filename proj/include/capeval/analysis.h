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

#ifndef CAPEVAL_ANALYSIS_H_
#define CAPEVAL_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "capeval/corpus.h"
#include "capeval/evaluation.h"
#include "capeval/stats.h"

namespace capeval {

enum class CollinearityMode { kFixedList, kVif };

CollinearityMode ParseCollinearityMode(std::string_view s);
std::string_view CollinearityModeName(CollinearityMode mode);

// Capabilities kept by the fixed-list mode.
const std::vector<std::string>& FixedListCapabilities();

inline constexpr double kDefaultVifThreshold = 10.0;

struct CollinearityResult {
  std::vector<std::string> retained;  // in input column order
  std::vector<std::string> dropped;   // in drop order
  std::vector<std::string> warnings;
};

// Variance-inflation factor of every column: 1 / (1 - R^2) of the column
// regressed on the others with an intercept. Exact dependence gives +inf.
Eigen::VectorXd VarianceInflationFactors(const Eigen::MatrixXd& x);

// kVif: drops zero-variance columns (with a warning), then repeatedly drops
// the column with the largest VIF until all are below `vif_threshold`; on
// ties the later column goes. kFixedList: keeps exactly
// FixedListCapabilities(), which must all be present.
CollinearityResult CollinearityFilter(const Eigen::MatrixXd& x,
                                      const std::vector<std::string>& names,
                                      CollinearityMode mode,
                                      double vif_threshold = kDefaultVifThreshold);

// For each seed, draws one subset per entry of `sizes` uniformly without
// replacement from `pool`. subsets[s][j] holds example ids in pool order.
// Throws ValidationError for a zero size or a size above the pool size.
std::vector<std::vector<std::vector<std::string>>> RandomSubsetBaseline(
    const std::vector<Example>& pool, const std::vector<std::size_t>& sizes,
    const std::vector<uint64_t>& seeds);

// For each seed: source_acc + N(0, sigma^2) elementwise, clamped to [0, 1].
// Throws ValidationError unless sigma > 0.
std::vector<Eigen::VectorXd> NoiseBaseline(const Eigen::VectorXd& source_acc,
                                           double sigma,
                                           const std::vector<uint64_t>& seeds);

// Sample standard deviation (n - 1 denominator).
double SampleStdDev(const Eigen::VectorXd& v);

struct AnalysisConfig {
  double alpha = 0.05;
  std::size_t seed_count = 100;
  uint64_t seed = 0;
  std::optional<double> noise_sigma;  // nullopt: sample std of source acc
  CollinearityMode collinearity = CollinearityMode::kFixedList;
  double vif_threshold = kDefaultVifThreshold;
  std::vector<std::string> retained_override;
  int jobs = 1;
};

// YAML keys: alpha, seeds, seed, noise_sigma (number or "auto"),
// collinearity ("fixed_list" | "vif"), vif_threshold, retained (list).
// Unknown keys are rejected. Throws ValidationError.
AnalysisConfig ParseAnalysisConfig(std::string_view text);
std::string WriteAnalysisConfig(const AnalysisConfig& config);

// Seeds for the random-subset and noise baselines.
std::vector<uint64_t> RandomSubsetSeeds(const AnalysisConfig& config);
std::vector<uint64_t> NoiseSeeds(const AnalysisConfig& config);

// Capability columns entering the augmented model: the override list when
// given, otherwise the collinearity filter over the matrix's capability
// columns.
CollinearityResult ResolveRetainedCapabilities(const ScoreMatrix& scores,
                                               const AnalysisConfig& config);

// Seed-averaged statistics for a baseline setting.
struct BaselineStats {
  double mean_adjusted_r2 = 0.0;
  double mean_f_statistic = 0.0;
  double mean_p_value = 0.0;
  double significance_rate = 0.0;  // fraction of seeds with p < alpha
  std::size_t seeds = 0;
};

struct DomainAnalysis {
  std::string domain;
  double baseline_adjusted_r2 = 0.0;    // source accuracy only
  double capability_adjusted_r2 = 0.0;  // + retained capabilities
  FTestResult capability_test;
  bool significant = false;
  std::optional<BaselineStats> random_subset;  // absent without columns
  BaselineStats noise;

  double Improvement() const {
    return capability_adjusted_r2 - baseline_adjusted_r2;
  }
};

struct AnalysisResult {
  double alpha = 0.05;
  double noise_sigma = 0.0;
  std::size_t noise_seed_count = 0;
  std::size_t random_seed_count = 0;
  std::size_t model_count = 0;
  std::vector<std::string> retained;
  std::vector<std::string> dropped;
  std::vector<DomainAnalysis> domains;
};

// Per target domain fits (a) source accuracy only, (b) + retained
// capabilities, (c) + each seed's random-subset columns, (d) + each seed's
// noisy source accuracy, and tests (b), (c), (d) against (a).
AnalysisResult RunAnalysis(const ScoreMatrix& scores,
                           const AnalysisConfig& config);

}  // namespace capeval

#endif  // CAPEVAL_ANALYSIS_H_
