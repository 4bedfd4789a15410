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

#ifndef CAPEVAL_STATS_H_
#define CAPEVAL_STATS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace capeval {

// Regularized incomplete beta function I_x(a, b), evaluated by continued
// fraction (modified Lentz) to a relative tolerance of 1e-12. Throws
// ValidationError for a, b <= 0 or x outside [0, 1], NumericalError if the
// fraction does not converge.
double RegularizedIncompleteBeta(double a, double b, double x);

// Upper tail P(F > f) of the F distribution with (d1, d2) degrees of freedom.
double FDistributionSurvival(double f, double d1, double d2);

struct RegressionResult {
  Eigen::VectorXd coefficients;     // intercept first when included
  Eigen::VectorXd standard_errors;  // same layout as coefficients
  Eigen::VectorXd residuals;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double rss = 0.0;
  double tss = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;  // predictors, excluding the intercept
  bool intercept = true;

  // n - p - 1 with an intercept, n - p without.
  std::size_t ResidualDof() const { return n - p - (intercept ? 1 : 0); }
};

// Index of the first design column that is (numerically) a linear
// combination of the columns before it, or nullopt if the design has full
// column rank. Columns are scaled to unit norm before the check.
std::optional<std::size_t> FindDependentColumn(const Eigen::MatrixXd& design);

// Minimum-norm-residual solution of design * beta = y by Householder QR.
// Requires rows >= cols and full column rank; a rank-deficient design throws
// NumericalError naming the dependent column (from `column_names` when given).
Eigen::VectorXd SolveLeastSquares(const Eigen::MatrixXd& design,
                                  const Eigen::VectorXd& y,
                                  const std::vector<std::string>& column_names = {});

// Ordinary least squares of y on X, optionally with an intercept column
// prepended. r2 = 1 - rss / tss with tss centered when an intercept is
// present and uncentered otherwise; when tss is zero r2 is defined as 0.
// Throws ValidationError if n <= p + 1 and NumericalError on rank deficiency.
RegressionResult FitOls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        bool include_intercept = true,
                        const std::vector<std::string>& column_names = {});

// 1 - (1 - r2)(n - 1)/(n - p - 1). Throws ValidationError if n <= p + 1.
double AdjustedR2(double r2, std::size_t n, std::size_t p);

struct FTestResult {
  double f_statistic = 0.0;
  std::size_t df_numerator = 0;
  std::size_t df_denominator = 0;
  double p_value = 1.0;
  bool perfect_fit = false;  // full model left no residual
};

// Nested-model ANOVA comparing a reduced fit to a full fit on the same y.
// F = ((rss_reduced - rss_full) / q) / (rss_full / dof_full), with
// q = p_full - p_reduced; a non-positive numerator gives F = 0, p = 1.
FTestResult NestedFTest(const RegressionResult& reduced,
                        const RegressionResult& full);

}  // namespace capeval

#endif  // CAPEVAL_STATS_H_
