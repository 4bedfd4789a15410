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

#include "capeval/distance.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "capeval/errors.h"
#include "capeval/parallel.h"
#include "capeval/random.h"
#include "capeval/stats.h"
#include "capeval/tokenizer.h"

namespace capeval {
namespace {

constexpr std::size_t kMinDomainExamples = 5;

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Item {
  uint64_t key;
  const Example* example;
  bool is_target;
};

}  // namespace

BagOfWords Featurize(const std::vector<Example>& examples,
                     std::size_t vocab_size) {
  if (examples.empty()) {
    throw ValidationError("cannot featurize an empty example set");
  }
  std::vector<std::vector<std::string>> docs;
  docs.reserve(examples.size());
  std::map<std::string, std::size_t> df;
  for (const Example& e : examples) {
    docs.push_back(Tokenize(e.text));
    std::vector<std::string> uniq = docs.back();
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (const std::string& t : uniq) ++df[t];
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  if (ranked.size() > vocab_size) ranked.resize(vocab_size);

  BagOfWords bow;
  std::unordered_map<std::string, int> column;
  for (const auto& [token, count] : ranked) {
    column.emplace(token, static_cast<int>(bow.vocabulary.size()));
    bow.vocabulary.push_back(token);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (const std::string& t : docs[i]) {
      auto it = column.find(t);
      if (it != column.end()) {
        triplets.emplace_back(static_cast<int>(i), it->second, 1.0);
      }
    }
  }
  bow.counts.resize(static_cast<Eigen::Index>(docs.size()),
                    static_cast<Eigen::Index>(bow.vocabulary.size()));
  bow.counts.setFromTriplets(triplets.begin(), triplets.end());  // sums dups
  bow.counts.makeCompressed();
  return bow;
}

double DomainClassifierError(const std::vector<Example>& source,
                             const std::vector<Example>& target,
                             uint64_t split_seed,
                             const ClassifierOptions& options) {
  if (source.size() < kMinDomainExamples || target.size() < kMinDomainExamples) {
    throw ValidationError(fmt::format(
        "domain classifier needs at least {} examples per domain (got {} and "
        "{})",
        kMinDomainExamples, source.size(), target.size()));
  }

  // Stratified split: within each domain the lowest-keyed 80% train.
  auto split = [&](const std::vector<Example>& domain, bool is_target,
                   std::vector<Item>& train, std::vector<Item>& test) {
    std::vector<Item> items;
    items.reserve(domain.size());
    for (const Example& e : domain) {
      items.push_back({DeriveSeed(split_seed, e.id), &e, is_target});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      return std::tie(a.key, a.example->id) < std::tie(b.key, b.example->id);
    });
    const std::size_t n_train = (4 * items.size()) / 5;
    train.insert(train.end(), items.begin(), items.begin() + n_train);
    test.insert(test.end(), items.begin() + n_train, items.end());
  };
  std::vector<Item> train;
  std::vector<Item> test;
  split(source, false, train, test);
  split(target, true, train, test);

  // Canonical order, independent of which side is the source.
  auto canonical = [](const Item& a, const Item& b) {
    return std::tie(a.key, a.example->id, a.example->text) <
           std::tie(b.key, b.example->id, b.example->text);
  };
  std::sort(train.begin(), train.end(), canonical);
  std::sort(test.begin(), test.end(), canonical);

  std::vector<Example> all;
  all.reserve(train.size() + test.size());
  for (const Item& it : train) all.push_back(*it.example);
  for (const Item& it : test) all.push_back(*it.example);
  BagOfWords bow = Featurize(all, options.vocab_size);
  SparseRows& x = bow.counts;
  for (Eigen::Index r = 0; r < x.outerSize(); ++r) {
    double norm2 = 0.0;
    for (SparseRows::InnerIterator it(x, r); it; ++it) {
      norm2 += it.value() * it.value();
    }
    if (norm2 == 0.0) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (SparseRows::InnerIterator it(x, r); it; ++it) it.valueRef() *= inv;
  }

  const auto n_train = static_cast<Eigen::Index>(train.size());
  const Eigen::Index dims = x.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dims);
  double b = 0.0;
  Eigen::VectorXd residual(n_train);
  Eigen::VectorXd grad(dims);
  const double inv_n = 1.0 / static_cast<double>(n_train);

  for (std::size_t iter = 0; iter < options.iterations; ++iter) {
    for (Eigen::Index r = 0; r < n_train; ++r) {
      double z = b;
      for (SparseRows::InnerIterator it(x, r); it; ++it) {
        z += w(it.col()) * it.value();
      }
      // d(logistic loss)/dz; written so that flipping the labels negates it
      // exactly.
      residual(r) = train[static_cast<std::size_t>(r)].is_target ? -Sigmoid(-z)
                                                                  : Sigmoid(z);
    }
    grad.setZero();
    double grad_b = 0.0;
    for (Eigen::Index r = 0; r < n_train; ++r) {
      for (SparseRows::InnerIterator it(x, r); it; ++it) {
        grad(it.col()) += it.value() * residual(r);
      }
      grad_b += residual(r);
    }
    w -= options.step_size * (grad * inv_n + options.l2 * w);
    b -= options.step_size * grad_b * inv_n;
  }

  double errors = 0.0;
  for (std::size_t k = 0; k < test.size(); ++k) {
    const auto r = n_train + static_cast<Eigen::Index>(k);
    double z = b;
    for (SparseRows::InnerIterator it(x, r); it; ++it) {
      z += w(it.col()) * it.value();
    }
    if (z == 0.0) {
      errors += 0.5;
    } else if ((z > 0.0) != test[k].is_target) {
      errors += 1.0;
    }
  }
  const double error = errors / static_cast<double>(test.size());
  return std::min(error, 0.5);
}

double ProxyADistance(double error) {
  if (!(error >= 0.0)) {
    throw ValidationError(
        fmt::format("classifier error must be non-negative (got {})", error));
  }
  if (error > 0.5) {
    spdlog::warn("classifier error {} above chance; clamped to 0.5", error);
    error = 0.5;
  }
  return 2.0 * (1.0 - 2.0 * error);
}

std::vector<DomainDistance> ComputeDomainDistances(
    const Corpus& corpus, uint64_t split_seed,
    const ClassifierOptions& options, int jobs) {
  const std::vector<Example> source = corpus.Domain(corpus.source_domain);
  std::vector<DomainDistance> out(corpus.target_domains.size());
  ParallelFor(out.size(), jobs, [&](std::size_t i) {
    const std::string& t = corpus.target_domains[i];
    DomainDistance& d = out[i];
    d.source = corpus.source_domain;
    d.target = t;
    d.classifier_error =
        DomainClassifierError(source, corpus.Domain(t), split_seed, options);
    d.proxy_a_distance = ProxyADistance(d.classifier_error);
  });
  return out;
}

ImprovementFit ImprovementVsDistance(const std::vector<DomainDistance>& distances,
                                     const AnalysisResult& analysis) {
  std::unordered_map<std::string, double> improvement;
  for (const DomainAnalysis& d : analysis.domains) {
    improvement.emplace(d.domain, d.Improvement());
  }
  ImprovementFit fit;
  for (const DomainDistance& d : distances) {
    auto it = improvement.find(d.target);
    if (it == improvement.end()) {
      throw ValidationError(
          fmt::format("no analysis for target domain '{}'", d.target));
    }
    fit.points.push_back({d.target, d.proxy_a_distance, it->second});
  }
  if (fit.points.size() < 2) {
    throw ValidationError(
        "improvement-vs-distance fit needs at least two target domains");
  }
  const auto n = static_cast<Eigen::Index>(fit.points.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = fit.points[static_cast<std::size_t>(i)].proxy_a_distance;
    y(i) = fit.points[static_cast<std::size_t>(i)].improvement;
  }
  const Eigen::VectorXd beta =
      SolveLeastSquares(design, y, {"intercept", "proxy_a_distance"});
  fit.intercept = beta(0);
  fit.slope = beta(1);
  return fit;
}

}  // namespace capeval
