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

#include "capeval/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "capeval/errors.h"

namespace capeval {
namespace {

constexpr double kBetaTolerance = 1e-12;
constexpr int kBetaMaxIterations = 10000;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), modified Lentz.
double BetaContinuedFraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kBetaMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kBetaTolerance) return h;
  }
  throw NumericalError(fmt::format(
      "incomplete beta continued fraction did not converge (a={}, b={}, x={})",
      a, b, x));
}

// `y` is 1 - x supplied by the caller so it keeps full precision.
double IncompleteBeta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, y) / b;
}

std::string ColumnLabel(const std::vector<std::string>& names, std::size_t i) {
  if (i < names.size()) return fmt::format("'{}'", names[i]);
  return fmt::format("#{}", i);
}

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ValidationError(
        fmt::format("incomplete beta needs a, b > 0 (got {}, {})", a, b));
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ValidationError(
        fmt::format("incomplete beta needs x in [0, 1] (got {})", x));
  }
  return std::clamp(IncompleteBeta(a, b, x, 1.0 - x), 0.0, 1.0);
}

double FDistributionSurvival(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) {
    throw ValidationError("F distribution degrees of freedom must be positive");
  }
  if (std::isnan(f)) throw NumericalError("F statistic is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double denom = d2 + d1 * f;
  const double x = d2 / denom;
  const double y = d1 * f / denom;
  return std::clamp(IncompleteBeta(d2 / 2.0, d1 / 2.0, x, y), 0.0, 1.0);
}

std::optional<std::size_t> FindDependentColumn(const Eigen::MatrixXd& design) {
  constexpr double kRankTolerance = 1e-10;
  Eigen::MatrixXd scaled = design;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    const double norm = scaled.col(j).norm();
    if (norm == 0.0) return static_cast<std::size_t>(j);
    scaled.col(j) /= norm;
  }
  // Gram-Schmidt style sweep via successive QR: column j is dependent if its
  // component orthogonal to columns [0, j) is negligible.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr;
  for (Eigen::Index j = 1; j < scaled.cols(); ++j) {
    qr.compute(scaled.leftCols(j));
    const Eigen::VectorXd coef = qr.solve(scaled.col(j));
    const double residual = (scaled.col(j) - scaled.leftCols(j) * coef).norm();
    if (residual < kRankTolerance * std::sqrt(static_cast<double>(j))) {
      return static_cast<std::size_t>(j);
    }
  }
  return std::nullopt;
}

Eigen::VectorXd SolveLeastSquares(const Eigen::MatrixXd& design,
                                  const Eigen::VectorXd& y,
                                  const std::vector<std::string>& column_names) {
  if (design.rows() != y.size()) {
    throw ValidationError(fmt::format("design has {} rows but y has {}",
                                      design.rows(), y.size()));
  }
  if (design.rows() < design.cols()) {
    throw ValidationError(fmt::format(
        "least squares needs at least as many rows ({}) as columns ({})",
        design.rows(), design.cols()));
  }
  if (const auto dep = FindDependentColumn(design)) {
    throw NumericalError(fmt::format(
        "design matrix is rank deficient: column {} is linearly dependent on "
        "the preceding columns",
        ColumnLabel(column_names, *dep)));
  }
  return design.householderQr().solve(y);
}

RegressionResult FitOls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        bool include_intercept,
                        const std::vector<std::string>& column_names) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto p = static_cast<std::size_t>(x.cols());
  if (y.size() != x.rows()) {
    throw ValidationError(
        fmt::format("X has {} rows but y has {}", x.rows(), y.size()));
  }
  if (n <= p + 1) {
    throw ValidationError(fmt::format(
        "OLS needs n > p + 1 (n={}, p={})", n, p));
  }

  const Eigen::Index offset = include_intercept ? 1 : 0;
  Eigen::MatrixXd design(x.rows(), x.cols() + offset);
  std::vector<std::string> names;
  if (include_intercept) {
    design.col(0).setOnes();
    names.emplace_back("intercept");
  }
  design.rightCols(x.cols()) = x;
  for (std::size_t j = 0; j < p; ++j) {
    names.push_back(j < column_names.size() ? column_names[j]
                                            : fmt::format("x{}", j));
  }

  RegressionResult result;
  result.n = n;
  result.p = p;
  result.intercept = include_intercept;
  result.coefficients = SolveLeastSquares(design, y, names);
  result.residuals = y - design * result.coefficients;
  result.rss = result.residuals.squaredNorm();
  if (include_intercept) {
    result.tss = (y.array() - y.mean()).matrix().squaredNorm();
  } else {
    result.tss = y.squaredNorm();
  }

  const double scale = std::max(y.squaredNorm(), kTiny);
  if (result.tss <= std::numeric_limits<double>::epsilon() * scale) {
    result.r2 = 0.0;
  } else {
    result.r2 = std::clamp(1.0 - result.rss / result.tss, 0.0, 1.0);
  }
  result.adjusted_r2 = include_intercept ? AdjustedR2(result.r2, n, p)
                                         : 1.0 - (1.0 - result.r2) *
                                                     static_cast<double>(n) /
                                                     static_cast<double>(n - p);

  // Standard errors from (R^T R)^{-1} of the thin QR factor.
  const auto k = design.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::MatrixXd r =
      qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const double sigma2 =
      result.rss / static_cast<double>(result.ResidualDof());
  result.standard_errors =
      (r_inv.rowwise().squaredNorm().array() * sigma2).sqrt().matrix();
  return result;
}

double AdjustedR2(double r2, std::size_t n, std::size_t p) {
  if (n <= p + 1) {
    throw ValidationError(fmt::format(
        "adjusted R^2 needs n > p + 1 (n={}, p={})", n, p));
  }
  if (p == 0) return r2;
  return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) /
                   static_cast<double>(n - p - 1);
}

FTestResult NestedFTest(const RegressionResult& reduced,
                        const RegressionResult& full) {
  if (reduced.n != full.n || reduced.intercept != full.intercept) {
    throw ValidationError(
        "nested F-test needs fits on the same sample with the same intercept");
  }
  if (full.p <= reduced.p) {
    throw ValidationError(fmt::format(
        "nested F-test needs more predictors in the full model ({} vs {})",
        full.p, reduced.p));
  }
  FTestResult out;
  out.df_numerator = full.p - reduced.p;
  out.df_denominator = full.ResidualDof();
  const double numerator = reduced.rss - full.rss;
  if (!(numerator > 0.0)) {
    out.f_statistic = 0.0;
    out.p_value = 1.0;
    return out;
  }
  if (full.rss <= 0.0) {
    spdlog::warn("nested F-test: full model has zero residual; reporting p=0");
    out.perfect_fit = true;
    out.f_statistic = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
    return out;
  }
  out.f_statistic = (numerator / static_cast<double>(out.df_numerator)) /
                    (full.rss / static_cast<double>(out.df_denominator));
  out.p_value = FDistributionSurvival(
      out.f_statistic, static_cast<double>(out.df_numerator),
      static_cast<double>(out.df_denominator));
  return out;
}

}  // namespace capeval
