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

#ifndef CAPEVAL_DISTANCE_H_
#define CAPEVAL_DISTANCE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "capeval/analysis.h"
#include "capeval/corpus.h"

namespace capeval {

struct BagOfWords {
  std::vector<std::string> vocabulary;
  // examples x vocabulary token counts.
  Eigen::SparseMatrix<double, Eigen::RowMajor> counts;
};

// Vocabulary = the `vocab_size` tokens with the highest document frequency
// over `examples`, ties broken lexicographically, listed in that rank order.
// Throws ValidationError on an empty example set.
BagOfWords Featurize(const std::vector<Example>& examples,
                     std::size_t vocab_size);

// Logistic-regression domain discriminator trained by full-batch gradient
// descent. Rows are L2-normalized counts.
struct ClassifierOptions {
  std::size_t iterations = 500;
  double step_size = 0.1;
  double l2 = 1e-3;
  std::size_t vocab_size = 5000;
};

// Held-out error of a classifier separating `source` from `target`. Each
// domain is split 80/20 by a per-example key derived from (split_seed, id),
// so the split and the training trajectory do not depend on which side is
// called the source. Ties (score exactly 0) count as half an error. Errors
// above 0.5 are clamped to 0.5. Throws ValidationError if either side has
// fewer than 5 examples.
double DomainClassifierError(const std::vector<Example>& source,
                             const std::vector<Example>& target,
                             uint64_t split_seed,
                             const ClassifierOptions& options = {});

// 2 (1 - 2 error). Errors above 0.5 are clamped with a warning; negative
// errors throw ValidationError.
double ProxyADistance(double error);

struct DomainDistance {
  std::string source;
  std::string target;
  double classifier_error = 0.0;
  double proxy_a_distance = 0.0;
};

// Distance from the corpus source domain to every target domain.
std::vector<DomainDistance> ComputeDomainDistances(
    const Corpus& corpus, uint64_t split_seed,
    const ClassifierOptions& options = {}, int jobs = 1);

struct ImprovementPoint {
  std::string domain;
  double proxy_a_distance = 0.0;
  double improvement = 0.0;  // capability minus baseline adjusted R^2
};

struct ImprovementFit {
  double intercept = 0.0;
  double slope = 0.0;
  std::vector<ImprovementPoint> points;
};

// Least-squares line of adjusted-R^2 improvement on proxy A-distance.
// Throws ValidationError with fewer than two domains and NumericalError when
// all distances coincide.
ImprovementFit ImprovementVsDistance(const std::vector<DomainDistance>& distances,
                                     const AnalysisResult& analysis);

}  // namespace capeval

#endif  // CAPEVAL_DISTANCE_H_
