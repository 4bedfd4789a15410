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

#ifndef CAPEVAL_SIMULATOR_H_
#define CAPEVAL_SIMULATOR_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "capeval/catalog.h"
#include "capeval/corpus.h"
#include "capeval/evaluation.h"

namespace capeval {

// Mixture key for examples that carry no capability keyword.
inline constexpr std::string_view kNoCapability = "none";

struct SimDomain {
  std::string name;
  // Capability name (or "none") -> probability that an example is built
  // around one of that capability's keywords. Sums to 1.
  std::map<std::string, double> mixture;
  // Target-generation coefficients: capability name -> weight of the model's
  // capability skill offset in this domain's correctness probability. Must
  // be empty for the source domain.
  std::map<std::string, double> coefficients;
};

struct SimConfig {
  uint64_t seed = 0;
  std::size_t model_count = 100;
  std::size_t examples_per_domain = 1000;
  std::size_t filler_vocabulary = 500;
  std::size_t min_filler_tokens = 6;
  std::size_t max_filler_tokens = 14;
  Catalog capabilities = DefaultCatalog();
  double base_skill_low = 0.65;
  double base_skill_high = 0.85;
  // Standard deviation of each model's per-capability skill offset.
  std::map<std::string, double> offset_sd;
  double default_offset_sd = 0.05;
  // Standard deviation of each model's per-target-domain shift.
  double observation_noise = 0.01;
  SimDomain source;
  std::vector<SimDomain> targets;

  double OffsetSd(const std::string& capability) const;
};

// Collects every problem with the config into one ValidationError.
void ValidateSimConfig(const SimConfig& config);

// YAML layout:
//
//   seed: 7
//   models: {count: 100, base_skill: [0.65, 0.85], offset_sd: 0.05}
//   examples_per_domain: 1000
//   filler: {vocabulary: 500, min_tokens: 6, max_tokens: 14}
//   observation_noise: 0.01
//   capabilities: default            # or a list of {name, keywords}
//   source: {name: home, mixture: {shifter: 0.5, none: 0.5}}
//   targets:
//     - {name: books, mixture: {...}, coefficients: {shifter: 0.5}}
//
// `offset_sd` may also be a map from capability name to sd (missing names
// use 0.05).
SimConfig ParseSimConfig(std::string_view text);

// Per-model latent parameters drawn from the master seed.
struct SimModels {
  std::vector<std::string> model_ids;
  Eigen::VectorXd base_skill;                 // M
  Eigen::MatrixXd offsets;                    // M x capabilities
  Eigen::MatrixXd domain_shift;               // M x targets
};

SimModels DrawModels(const SimConfig& config);

// Per domain, examples_per_domain texts made of filler tokens with one
// keyword of the sampled capability spliced in. Labels alternate
// positive/negative. Source examples are tagged split "validation", target
// examples "test".
Corpus GenerateCorpus(const SimConfig& config);

// Model m predicts example e correctly with probability
//   clamp(base_m + sum_c offset_mc * contains(e, c)
//         + [target d] sum_c coef_dc * offset_mc + shift_md).
std::vector<PredictionSet> GeneratePredictions(const SimConfig& config,
                                               const Corpus& corpus,
                                               int jobs = 1);

// Closed-form expectations given the drawn model parameters.
struct GroundTruth {
  std::vector<std::string> model_ids;
  std::vector<std::string> capability_names;
  Eigen::VectorXd source_accuracy;
  // Expected slice accuracy on the source domain; capabilities with zero
  // expected coverage are omitted.
  std::map<std::string, Eigen::VectorXd> slice_accuracy;
  // domain -> capability -> expected slice coverage.
  std::map<std::string, std::map<std::string, double>> coverage;
  // Target accuracy including each model's domain shift.
  std::map<std::string, Eigen::VectorXd> target_accuracy;
  // Target accuracy without the domain shift.
  std::map<std::string, Eigen::VectorXd> target_structural;
};

GroundTruth ComputeGroundTruth(const SimConfig& config);

// Population regression of a target's structural accuracy on the expected
// source accuracy and the listed capabilities' expected slice accuracies.
// Returns (intercept, source, capabilities...). Throws NumericalError if the
// expected features are collinear.
Eigen::VectorXd ExpectedCoefficients(const GroundTruth& truth,
                                     const std::string& target,
                                     const std::vector<std::string>& capabilities);

// Ground-truth sidecar as pretty-printed JSON.
std::string WriteGroundTruth(const SimConfig& config, const SimModels& models,
                             const GroundTruth& truth);

}  // namespace capeval

#endif  // CAPEVAL_SIMULATOR_H_
