#include "rscca/function_space.h"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "rscca/error.h"

namespace rscca {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(GridTest, FivePointTrapezoid) {
  const Grid g = BuildGrid(0.0, 1.0, 5);
  const double pts[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const double wts[] = {0.125, 0.25, 0.25, 0.25, 0.125};
  for (int k = 0; k < 5; ++k) {
    EXPECT_DOUBLE_EQ(g.points()[k], pts[k]);
    EXPECT_DOUBLE_EQ(g.weights()[k], wts[k]);
  }
}

TEST(GridTest, WeightsSumToLength) {
  for (Index m : {4, 7, 100, 1001}) {
    EXPECT_NEAR(BuildGrid(0.0, 1.0, m).weights().sum(), 1.0, 1e-12);
  }
  EXPECT_NEAR(BuildGrid(0.0, 2.0, 101).weights().sum(), 2.0, 2e-12);
}

TEST(GridTest, RejectsBadInput) {
  EXPECT_THROW(BuildGrid(0.0, 1.0, 3), InputError);
  EXPECT_THROW(BuildGrid(1.0, 1.0, 10), InputError);
  EXPECT_THROW(BuildGrid(2.0, 1.0, 10), InputError);
  VectorXd unsorted(4);
  unsorted << 0.0, 0.5, 0.4, 1.0;
  EXPECT_THROW(Grid{unsorted}, InputError);
}

TEST(GridTest, ParsesSpec) {
  const Grid g = ParseGridSpec("0:24:101");
  EXPECT_EQ(g.size(), 101);
  EXPECT_DOUBLE_EQ(g.upper(), 24.0);
  EXPECT_THROW(ParseGridSpec("0:1"), InputError);
  EXPECT_THROW(ParseGridSpec("0:1:x"), InputError);
  EXPECT_THROW(ParseGridSpec("0:1:10.5"), InputError);
}

TEST(GridTest, IrregularWeightsArePositive) {
  VectorXd t(5);
  t << 0.0, 0.1, 0.5, 0.6, 2.0;
  const Grid g(t);
  EXPECT_TRUE((g.weights().array() > 0.0).all());
  EXPECT_NEAR(g.weights().sum(), 2.0, 1e-12);
}

TEST(FunctionalSampleTest, Validates) {
  const Grid g = BuildGrid(0.0, 1.0, 5);
  EXPECT_THROW(FunctionalSample(g, MatrixXd::Zero(1, 5)), InputError);
  EXPECT_THROW(FunctionalSample(g, MatrixXd::Zero(3, 4)), InputError);
  MatrixXd bad = MatrixXd::Zero(3, 5);
  bad(1, 2) = std::nan("");
  EXPECT_THROW(FunctionalSample(g, bad), InputError);
  EXPECT_NO_THROW(FunctionalSample(g, MatrixXd::Zero(2, 5)));
}

TEST(BasisTest, FourierGramIsIdentity) {
  const BasisSystem b = BuildBasis(BasisKind::kFourier, 5, BuildGrid(0.0, 1.0, 1001));
  EXPECT_LT((b.gram() - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(BasisTest, FourierPenaltyDiagonal) {
  const BasisSystem b = BuildBasis(BasisKind::kFourier, 5, BuildGrid(0.0, 1.0, 1001));
  const double w1 = std::pow(2.0 * kPi, 4);
  const double w2 = std::pow(4.0 * kPi, 4);
  const double expected[] = {0.0, w1, w1, w2, w2};
  // Closed form cross-checked by a fine Simpson integral of (xi'')^2.
  const double simpson = oracle::Simpson(
      [](double t) {
        const double v = -std::pow(2.0 * kPi, 2) * oracle::Fourier(1, t, 0.0, 1.0);
        return v * v;
      },
      0.0, 1.0, 20000);
  EXPECT_NEAR(simpson, w1, 1e-6 * w1);
  EXPECT_LT(std::abs(b.penalty()(0, 0)), 1e-8);
  for (int j = 1; j < 5; ++j) EXPECT_NEAR(b.penalty()(j, j), expected[j], 0.01 * expected[j]);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (i != j) {
        EXPECT_LT(std::abs(b.penalty()(i, j)), 1e-6 * w2);
      }
    }
  }
}

TEST(BasisTest, FourierMatchesClosedForm) {
  const Grid g = BuildGrid(-1.0, 2.0, 31);
  const BasisSystem b = BuildBasis(BasisKind::kFourier, 7, g);
  for (int j = 0; j < 7; ++j) {
    for (Index k = 0; k < g.size(); ++k) {
      EXPECT_NEAR(b.eval()(j, k), oracle::Fourier(j, g.points()[k], -1.0, 3.0), 1e-12);
    }
  }
}

TEST(BasisTest, BSplinePenaltyNullSpaceIsLinear) {
  const BasisSystem b = BuildBasis(BasisKind::kBSpline, 8, BuildGrid(0.0, 1.0, 201));
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(b.penalty());
  const double top = eig.eigenvalues().maxCoeff();
  int small = 0;
  for (Index j = 0; j < 8; ++j) small += eig.eigenvalues()[j] < 1e-8 * top ? 1 : 0;
  EXPECT_EQ(small, 2);

  const PenaltyNullspace ns = ComputePenaltyNullspace(b, 1e-8);
  ASSERT_EQ(ns.basis.cols(), 2);
  // Each null vector evaluates to a degree-1 polynomial.
  const VectorXd& t = b.grid().points();
  MatrixXd design(t.size(), 2);
  design.col(0).setOnes();
  design.col(1) = t;
  for (int c = 0; c < 2; ++c) {
    const VectorXd curve = EvaluateCurve(b, ns.basis.col(c));
    const VectorXd fit = design * design.colPivHouseholderQr().solve(curve);
    EXPECT_LT((curve - fit).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(BasisTest, BSplinePartitionOfUnity) {
  const BasisSystem b = BuildBasis(BasisKind::kBSpline, 9, BuildGrid(0.0, 3.0, 61));
  const VectorXd sums = b.eval().colwise().sum().transpose();
  EXPECT_LT((sums.array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT(b.eval_dd().colwise().sum().cwiseAbs().maxCoeff(), 1e-8);
}

TEST(BasisTest, BSplineSecondDerivativeMatchesDifferences) {
  const Grid g = BuildGrid(0.0, 1.0, 2001);
  const BasisSystem b = BuildBasis(BasisKind::kBSpline, 7, g);
  const double h = g.points()[1] - g.points()[0];
  for (int j = 0; j < 7; ++j) {
    for (Index k = 10; k < g.size() - 10; k += 97) {
      const double fd = (b.eval()(j, k + 1) - 2.0 * b.eval()(j, k) + b.eval()(j, k - 1)) / (h * h);
      EXPECT_NEAR(b.eval_dd()(j, k), fd, 1e-3 * (1.0 + std::abs(fd)));
    }
  }
}

TEST(BasisTest, RejectsBadDimensions) {
  const Grid g = BuildGrid(0.0, 1.0, 21);
  EXPECT_THROW(BuildBasis(BasisKind::kFourier, 4, g), InputError);
  EXPECT_THROW(BuildBasis(BasisKind::kFourier, 1, g), InputError);
  EXPECT_THROW(BuildBasis(BasisKind::kBSpline, 3, g), InputError);
  EXPECT_THROW(BuildBasis(BasisKind::kBSpline, 22, g), InputError);
  EXPECT_THROW(BuildBasis(BasisKind::kFourier, 23, g), InputError);
  EXPECT_THROW(ParseBasisKind("wavelet"), InputError);
  EXPECT_EQ(ParseBasisKind("bspline"), BasisKind::kBSpline);
}

TEST(BasisTest, MatricesSymmetricAndDefinite) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (BasisKind kind : {BasisKind::kFourier, BasisKind::kBSpline}) {
    const BasisSystem b = BuildBasis(kind, 11, BuildGrid(0.0, 5.0, 151));
    EXPECT_LT((b.gram() - b.gram().transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((b.penalty() - b.penalty().transpose()).cwiseAbs().maxCoeff(), 1e-12);
    for (int r = 0; r < 200; ++r) {
      VectorXd c(11);
      for (Index j = 0; j < 11; ++j) c[j] = normal(rng);
      EXPECT_GT(c.dot(b.gram() * c), 0.0);
      EXPECT_GE(c.dot(b.penalty() * c), -1e-10);
    }
  }
}

TEST(ProjectTest, BasisFunctionGivesUnitVector) {
  const Grid g = BuildGrid(0.0, 1.0, 1001);
  const BasisSystem b = BuildBasis(BasisKind::kFourier, 7, g);
  MatrixXd values(2, g.size());
  values.row(0) = b.eval().row(1);
  values.row(1).setZero();
  const MatrixXd s = ProjectSample(FunctionalSample(g, values), b);
  VectorXd e2 = VectorXd::Zero(7);
  e2[1] = 1.0;
  EXPECT_LT((s.row(0).transpose() - e2).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(s.row(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ProjectTest, IdentityCurveMatchesSimpson) {
  const Grid g = BuildGrid(0.0, 1.0, 1001);
  const BasisSystem b = BuildBasis(BasisKind::kFourier, 3, g);
  MatrixXd values(2, g.size());
  values.row(0) = g.points().transpose();
  values.row(1) = g.points().transpose();
  const MatrixXd s = ProjectSample(FunctionalSample(g, values), b);
  for (int j = 0; j < 3; ++j) {
    const double ref =
        oracle::Simpson([j](double t) { return t * oracle::Fourier(j, t, 0.0, 1.0); }, 0.0, 1.0, 100000);
    EXPECT_NEAR(s(0, j), ref, 1e-6) << "j=" << j;
  }
  EXPECT_NEAR(s(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(s(0, 1), -1.0 / (std::sqrt(2.0) * kPi), 1e-6);
}

TEST(ProjectTest, PolynomialInnerProducts) {
  const Grid g = BuildGrid(0.0, 1.0, 1001);
  const BasisSystem b = BuildBasis(BasisKind::kBSpline, 6, g);
  MatrixXd values(2, g.size());
  values.row(0).setOnes();
  for (Index k = 0; k < g.size(); ++k) values(1, k) = 2.0 - 3.0 * g.points()[k];
  const MatrixXd s = ProjectSample(FunctionalSample(g, values), b);
  // Integral of each spline is the sum of its trapezoid-exact values; compare
  // to a fine Simpson rule on the grid-interpolated spline.
  for (int j = 0; j < 6; ++j) {
    const VectorXd row = b.eval().row(j).transpose();
    auto spline = [&](double t) {
      const double pos = t * 1000.0;
      const auto k = std::min<Index>(static_cast<Index>(pos), 999);
      const double f = pos - static_cast<double>(k);
      return (1.0 - f) * row[k] + f * row[k + 1];
    };
    const double ref0 = oracle::Simpson(spline, 0.0, 1.0, 200000);
    const double ref1 = oracle::Simpson([&](double t) { return (2.0 - 3.0 * t) * spline(t); }, 0.0, 1.0, 200000);
    EXPECT_NEAR(s(0, j), ref0, 1e-6);
    EXPECT_NEAR(s(1, j), ref1, 1e-6);
  }
}

TEST(ProjectTest, RejectsGridMismatch) {
  const BasisSystem b = BuildBasis(BasisKind::kFourier, 3, BuildGrid(0.0, 1.0, 11));
  EXPECT_THROW(ProjectSample(FunctionalSample(BuildGrid(0.0, 2.0, 11), MatrixXd::Zero(2, 11)), b),
               InputError);
}

TEST(PenalizedNormTest, Examples) {
  const BasisSystem b = BuildBasis(BasisKind::kFourier, 5, BuildGrid(0.0, 1.0, 1001));
  Direction u{VectorXd::Ones(5)};
  EXPECT_DOUBLE_EQ(PenalizedNormSq(b, u, 0.7, 0.0), 0.7);

  Direction flat{VectorXd::Zero(5)};
  flat.coef[0] = 3.0;
  for (double tau : {0.0, 1.0, 1e6}) EXPECT_NEAR(PenalizedNormSq(b, flat, 0.4, tau), 0.4, 1e-9);

  u.coef *= std::sqrt(2.0 / Roughness(b, u.coef));
  EXPECT_NEAR(PenalizedNormSq(b, u, 1.0, 0.1), 1.2, 1e-12);
  EXPECT_THROW(PenalizedNormSq(b, u, 1.0, -0.1), InputError);
}

TEST(NullspaceTest, FourierIsConstants) {
  const BasisSystem b = BuildBasis(BasisKind::kFourier, 9, BuildGrid(0.0, 1.0, 1001));
  const PenaltyNullspace ns = ComputePenaltyNullspace(b, 1e-8);
  ASSERT_EQ(ns.basis.cols(), 1);
  EXPECT_NEAR(std::abs(ns.basis(0, 0)), 1.0, 1e-8);
  // R >= (2 pi)^4 J off the null space.
  EXPECT_GE(ns.coercivity, std::pow(2.0 * kPi, 4) * (1.0 - 1e-3));
}

TEST(NullspaceTest, BSplineHasDimensionTwo) {
  const BasisSystem b = BuildBasis(BasisKind::kBSpline, 10, BuildGrid(0.0, 1.0, 301));
  const PenaltyNullspace ns = ComputePenaltyNullspace(b, 1e-8);
  EXPECT_EQ(ns.basis.cols(), 2);
  EXPECT_GT(ns.coercivity, 0.0);
}

TEST(NullspaceTest, ZeroToleranceKeepsOnlyNonpositive) {
  const BasisSystem b = BuildBasis(BasisKind::kFourier, 7, BuildGrid(0.0, 1.0, 501));
  const PenaltyNullspace ns = ComputePenaltyNullspace(b, 0.0);
  EXPECT_LE(ns.basis.cols(), 1);
}

TEST(CurveTest, ProjectionBetweenBases) {
  const Grid g = BuildGrid(0.0, 24.0, 401);
  const BasisSystem small = BuildBasis(BasisKind::kFourier, 5, g);
  const BasisSystem large = BuildBasis(BasisKind::kFourier, 11, g);
  VectorXd coef(5);
  coef << 0.3, -1.0, 0.5, 0.2, 0.1;
  const VectorXd up = ProjectCoefficients(large, small, coef);
  EXPECT_LT((up.head(5) - coef).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(up.tail(6).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((EvaluateCurve(large, up) - EvaluateCurve(small, coef)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((CrossGram(large, small).topRows(5) - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
}

}  // namespace
}  // namespace rscca
