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

#include <cmath>
#include <string>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include "capeval/errors.h"
#include "capeval/random.h"

namespace capeval {
namespace {

using boost::multiprecision::cpp_rational;
using RationalMatrix = std::vector<std::vector<cpp_rational>>;

// Dyadic values are exact in both double and rational arithmetic.
double Dyadic(Rng& rng) {
  return static_cast<double>(static_cast<int>(UniformIndex(rng, 2049)) - 1024) / 256.0;
}

// Solves (X'X) b = X'y exactly by Gauss-Jordan elimination over rationals.
std::vector<cpp_rational> ExactNormalEquations(const Eigen::MatrixXd& x,
                                               const Eigen::VectorXd& y) {
  const auto n = x.rows();
  const auto p = x.cols();
  RationalMatrix a(p, std::vector<cpp_rational>(p + 1));
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      cpp_rational s = 0;
      for (Eigen::Index r = 0; r < n; ++r) s += cpp_rational(x(r, i)) * cpp_rational(x(r, j));
      a[i][j] = s;
    }
    cpp_rational s = 0;
    for (Eigen::Index r = 0; r < n; ++r) s += cpp_rational(x(r, i)) * cpp_rational(y(r));
    a[i][p] = s;
  }
  for (Eigen::Index c = 0; c < p; ++c) {
    Eigen::Index pivot = c;
    while (a[pivot][c] == 0) ++pivot;
    std::swap(a[pivot], a[c]);
    for (Eigen::Index r = 0; r < p; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const cpp_rational f = a[r][c] / a[c][c];
      for (Eigen::Index k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<cpp_rational> b(p);
  for (Eigen::Index i = 0; i < p; ++i) b[i] = a[i][p] / a[i][i];
  return b;
}

TEST(IncompleteBetaTest, Boundaries) {
  EXPECT_EQ(RegularizedIncompleteBeta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(RegularizedIncompleteBeta(2.0, 3.0, 1.0), 1.0);
}

TEST(IncompleteBetaTest, UniformCaseIsIdentity) {
  for (double x : {0.0, 0.1, 0.25, 0.5, 0.77, 0.999}) {
    EXPECT_NEAR(RegularizedIncompleteBeta(1.0, 1.0, x), x, 1e-15);
  }
}

TEST(IncompleteBetaTest, ClosedFormPolynomial) {
  // I_x(2,3) = 6x^2 - 8x^3 + 3x^4.
  EXPECT_NEAR(RegularizedIncompleteBeta(2.0, 3.0, 0.5), 0.6875, 1e-14);
  for (double x = 0.05; x < 1.0; x += 0.05) {
    const double expected = 6 * x * x - 8 * x * x * x + 3 * x * x * x * x;
    EXPECT_NEAR(RegularizedIncompleteBeta(2.0, 3.0, x), expected, 1e-13);
  }
}

// Frozen from a 40-digit evaluation.
TEST(IncompleteBetaTest, HighPrecisionReferences) {
  struct Case {
    double a, b, x, value;
  };
  const Case cases[] = {
      {0.5, 5.0, 0.2, 0.85507239459591959},
      {10.0, 20.0, 0.3, 0.36400408107194423},
      {100.0, 150.0, 0.41, 0.62936566529306554},
      {0.1, 0.2, 0.9, 0.78048803200244669},
  };
  for (const Case& c : cases) {
    EXPECT_NEAR(RegularizedIncompleteBeta(c.a, c.b, c.x), c.value, 1e-12)
        << c.a << "," << c.b << "," << c.x;
  }
}

TEST(IncompleteBetaTest, AgreesWithBoost) {
  Rng rng(101);
  for (int trial = 0; trial < 2000; ++trial) {
    const double a = 0.05 + 60.0 * UniformUnit(rng);
    const double b = 0.05 + 60.0 * UniformUnit(rng);
    const double x = UniformUnit(rng);
    ASSERT_NEAR(RegularizedIncompleteBeta(a, b, x), boost::math::ibeta(a, b, x), 1e-11)
        << a << "," << b << "," << x;
  }
}

TEST(IncompleteBetaTest, InvalidArgumentsRejected) {
  EXPECT_THROW(RegularizedIncompleteBeta(0.0, 1.0, 0.5), ValidationError);
  EXPECT_THROW(RegularizedIncompleteBeta(1.0, 1.0, 1.5), ValidationError);
}

TEST(FDistributionTest, HighPrecisionSurvival) {
  struct Case {
    double d1, d2;
    double values[5];
  };
  const double fs[5] = {0.5, 1.0, 2.0, 4.0, 10.0};
  const Case cases[] = {
      {1, 10,
       {0.49564750438311994, 0.34089313230205987, 0.18766987086960301,
        0.073388034770740366, 0.010119559735433715}},
      {3, 94,
       {0.68318734135730656, 0.39647309740854588, 0.11929961576443322,
        0.0099635330163448108, 8.7807135816448051e-6}},
      {5, 20,
       {0.77260438579050489, 0.44302518468487967, 0.12250724468184247,
        0.011183751855265597, 6.5521831415955075e-5}},
  };
  for (const Case& c : cases) {
    for (int i = 0; i < 5; ++i) {
      EXPECT_NEAR(FDistributionSurvival(fs[i], c.d1, c.d2), c.values[i], 1e-12)
          << "F=" << fs[i] << " df=(" << c.d1 << "," << c.d2 << ")";
    }
  }
}

// Published critical values: the survival function there equals alpha.
TEST(FDistributionTest, PublishedCriticalValues) {
  struct Case {
    double d1, d2, f05, f01;
  };
  const Case cases[] = {{1, 10, 4.96460274373, 10.0442892734},
                        {3, 94, 2.70144763404, 3.99704423639},
                        {5, 20, 2.71088983721, 4.10268463058}};
  for (const Case& c : cases) {
    EXPECT_NEAR(FDistributionSurvival(c.f05, c.d1, c.d2), 0.05, 1e-9);
    EXPECT_NEAR(FDistributionSurvival(c.f01, c.d1, c.d2), 0.01, 1e-9);
  }
}

TEST(FDistributionTest, AgreesWithBoost) {
  Rng rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const double d1 = 1 + static_cast<double>(UniformIndex(rng, 30));
    const double d2 = 1 + static_cast<double>(UniformIndex(rng, 200));
    const double f = 20.0 * UniformUnit(rng);
    boost::math::fisher_f dist(d1, d2);
    ASSERT_NEAR(FDistributionSurvival(f, d1, d2),
                boost::math::cdf(boost::math::complement(dist, f)), 1e-11);
  }
}

TEST(FDistributionTest, StrictlyDecreasingInF) {
  double prev = 1.0;
  for (double f = 0.1; f < 50.0; f *= 1.3) {
    const double p = FDistributionSurvival(f, 3, 94);
    EXPECT_LT(p, prev);
    EXPECT_GE(p, 0.0);
    prev = p;
  }
  EXPECT_EQ(FDistributionSurvival(0.0, 3, 94), 1.0);
}

TEST(FitOlsTest, ExactLine) {
  Eigen::MatrixXd x(3, 1);
  x << 0, 1, 2;
  Eigen::VectorXd y(3);
  y << 0, 2, 4;
  // n = p + 2 is the smallest size with a residual degree of freedom.
  const RegressionResult r = FitOls(x, y);
  EXPECT_NEAR(r.coefficients(0), 0.0, 1e-12);
  EXPECT_NEAR(r.coefficients(1), 2.0, 1e-12);
  EXPECT_NEAR(r.r2, 1.0, 1e-12);
}

TEST(FitOlsTest, ConstantTargetHasZeroR2) {
  Eigen::MatrixXd x(5, 1);
  x << 1, 2, 3, 4, 5;
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(5, 0.7);
  const RegressionResult r = FitOls(x, y);
  EXPECT_EQ(r.r2, 0.0);
  EXPECT_NEAR(r.coefficients(0), 0.7, 1e-12);
  EXPECT_NEAR(r.coefficients(1), 0.0, 1e-12);
}

TEST(FitOlsTest, TooFewSamplesRejected) {
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, 3, 4, 5, 7;
  EXPECT_THROW(FitOls(x, Eigen::VectorXd::Ones(3)), ValidationError);
}

TEST(FitOlsTest, RankDeficiencyNamesColumn) {
  Eigen::MatrixXd x(6, 3);
  x.col(0) << 1, 2, 3, 4, 5, 6;
  x.col(1) << 2, 1, 0, 3, 1, 2;
  x.col(2) = 2.0 * x.col(0) - x.col(1);
  Eigen::VectorXd y(6);
  y << 1, 3, 2, 5, 4, 6;
  try {
    FitOls(x, y, true, {"alpha", "beta", "gamma"});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos) << e.what();
  }
}

TEST(FitOlsTest, MatchesExactRationalSolve) {
  Rng rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 50, p = 3;
    Eigen::MatrixXd design(n, p + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      design(r, 0) = 1.0;
      for (Eigen::Index c = 1; c <= p; ++c) design(r, c) = Dyadic(rng);
      y(r) = Dyadic(rng);
    }
    const auto exact = ExactNormalEquations(design, y);
    const RegressionResult fit = FitOls(design.rightCols(p), y);
    for (Eigen::Index c = 0; c <= p; ++c) {
      ASSERT_NEAR(fit.coefficients(c), static_cast<double>(exact[c]), 1e-10)
          << "trial " << trial << " coefficient " << c;
    }
  }
}

TEST(FitOlsTest, ResidualsOrthogonalToDesign) {
  Rng rng(9);
  Eigen::MatrixXd x(40, 4);
  Eigen::VectorXd y(40);
  for (Eigen::Index r = 0; r < 40; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) x(r, c) = Gaussian(rng, 0, 1);
    y(r) = Gaussian(rng, 0, 1);
  }
  const RegressionResult fit = FitOls(x, y);
  EXPECT_NEAR(fit.residuals.sum() / fit.residuals.norm(), 0.0, 1e-8);
  for (Eigen::Index c = 0; c < 4; ++c) {
    EXPECT_NEAR(x.col(c).dot(fit.residuals) / (x.col(c).norm() * fit.residuals.norm()),
                0.0, 1e-8);
  }
}

TEST(FitOlsTest, AddingColumnNeverLowersR2) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 12 + static_cast<Eigen::Index>(UniformIndex(rng, 20));
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < 3; ++c) x(r, c) = Gaussian(rng, 0, 1);
      y(r) = x(r, 0) + Gaussian(rng, 0, 1);
    }
    const RegressionResult small = FitOls(x.leftCols(2), y);
    const RegressionResult big = FitOls(x, y);
    ASSERT_GE(big.r2, small.r2 - 1e-12);
    ASSERT_LE(big.adjusted_r2, big.r2 + 1e-15);
    ASSERT_GE(big.r2, 0.0);
    ASSERT_LE(big.r2, 1.0);
  }
}

TEST(FitOlsTest, StandardErrorsMatchClassicalFormula) {
  Rng rng(44);
  Eigen::MatrixXd x(30, 2);
  Eigen::VectorXd y(30);
  for (Eigen::Index r = 0; r < 30; ++r) {
    x(r, 0) = Gaussian(rng, 0, 1);
    x(r, 1) = Gaussian(rng, 0, 1);
    y(r) = 0.3 + x(r, 0) - 0.5 * x(r, 1) + Gaussian(rng, 0, 0.2);
  }
  const RegressionResult fit = FitOls(x, y);
  Eigen::MatrixXd design(30, 3);
  design << Eigen::VectorXd::Ones(30), x;
  const double sigma2 = fit.rss / 27.0;
  const Eigen::MatrixXd cov = sigma2 * (design.transpose() * design).inverse();
  for (Eigen::Index c = 0; c < 3; ++c) {
    EXPECT_NEAR(fit.standard_errors(c), std::sqrt(cov(c, c)), 1e-10);
  }
}

TEST(FitOlsTest, WithoutIntercept) {
  Eigen::MatrixXd x(4, 1);
  x << 1, 2, 3, 4;
  Eigen::VectorXd y(4);
  y << 2, 4, 6, 8;
  const RegressionResult fit = FitOls(x, y, false);
  ASSERT_EQ(fit.coefficients.size(), 1);
  EXPECT_NEAR(fit.coefficients(0), 2.0, 1e-12);
  EXPECT_EQ(fit.ResidualDof(), 3u);
}

TEST(AdjustedR2Test, Formula) {
  EXPECT_EQ(AdjustedR2(1.0, 20, 4), 1.0);
  EXPECT_NEAR(AdjustedR2(0.5, 10, 2), 1.0 - 0.5 * 9.0 / 7.0, 1e-15);
  EXPECT_NEAR(AdjustedR2(0.5, 10, 2), 0.35714285714285715, 1e-15);
  EXPECT_EQ(AdjustedR2(0.42, 10, 0), 0.42);
  EXPECT_THROW(AdjustedR2(0.5, 3, 2), ValidationError);
}

RegressionResult Fake(double rss, std::size_t n, std::size_t p) {
  RegressionResult r;
  r.rss = rss;
  r.n = n;
  r.p = p;
  return r;
}

TEST(NestedFTest, HandArithmetic) {
  const FTestResult t = NestedFTest(Fake(10, 100, 2), Fake(5, 100, 5));
  EXPECT_EQ(t.df_numerator, 3u);
  EXPECT_EQ(t.df_denominator, 94u);
  EXPECT_NEAR(t.f_statistic, (5.0 / 3.0) / (5.0 / 94.0), 1e-12);
  EXPECT_NEAR(t.f_statistic, 31.333333333333333, 1e-12);
  EXPECT_LT(t.p_value, 1e-6);
  EXPECT_NEAR(t.p_value, 3.958002365128325e-14, 1e-20);
}

TEST(NestedFTest, PublishedTableValue) {
  // F = 4.0 at (3, 94): survival from a 40-digit reference.
  EXPECT_NEAR(FDistributionSurvival(4.0, 3, 94), 0.0099635330163448108, 1e-6);
}

TEST(NestedFTest, NoImprovement) {
  const FTestResult t = NestedFTest(Fake(7, 50, 1), Fake(7, 50, 3));
  EXPECT_EQ(t.f_statistic, 0.0);
  EXPECT_EQ(t.p_value, 1.0);
}

TEST(NestedFTest, InvalidNesting) {
  EXPECT_THROW(NestedFTest(Fake(7, 50, 3), Fake(5, 50, 3)), ValidationError);
  EXPECT_THROW(NestedFTest(Fake(7, 50, 1), Fake(5, 49, 3)), ValidationError);
}

TEST(NestedFTest, PerfectFullModel) {
  const FTestResult t = NestedFTest(Fake(2, 30, 1), Fake(0, 30, 2));
  EXPECT_TRUE(t.perfect_fit);
  EXPECT_EQ(t.p_value, 0.0);
}

}  // namespace
}  // namespace capeval
