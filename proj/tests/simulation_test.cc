#include "rscca/simulation.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "rscca/error.h"
#include "rscca/experiments.h"
#include "rscca/scca.h"

namespace rscca {
namespace {

BasisSystem Fourier(Index d) { return BuildBasis(BasisKind::kFourier, d, BuildGrid(0.0, 24.0, 101)); }

VectorXd Spectrum(std::initializer_list<double> v) {
  VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(ModelTest, IndependentAndPerfect) {
  const BasisSystem b = Fourier(7);
  EXPECT_NEAR(MakeCanonicalModel(b, 0.0, Spectrum({1.0, 0.5})).lambda0(), 0.0, 1e-12);
  const ProcessModel perfect = MakeCanonicalModel(b, 1.0, Spectrum({1.0, 0.5}));
  EXPECT_NEAR(perfect.lambda0(), 1.0, 1e-12);
  const MatrixXd s = SampleScores(perfect, 50, 3);
  EXPECT_LT((s.col(0) - s.col(2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ModelTest, FourScoreVerifier) {
  const ProcessModel m = MakeCanonicalModel(Fourier(9), 0.7, Spectrum({1.0, 0.5, 0.25, 0.125}), 0);
  EXPECT_NEAR(oracle::PopulationLambda(m.score_cov(), 4), 0.49, 1e-10);
  EXPECT_NEAR(m.lambda0(), 0.49, 1e-10);
  VectorXd e1 = VectorXd::Zero(9);
  e1[0] = 1.0;
  EXPECT_LT((m.true_phi().cwiseAbs() - e1).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((m.true_psi().cwiseAbs() - e1).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ModelTest, LeadingComponentPlacement) {
  const ProcessModel m = BuildModel(ModelConfig{});
  EXPECT_NEAR(std::abs(m.true_phi()[1]), 1.0, 1e-10);
  EXPECT_EQ(m.components()[0], 1);
}

TEST(ModelTest, RejectsInvalidParameters) {
  const BasisSystem b = Fourier(5);
  EXPECT_THROW(MakeCanonicalModel(b, 1.2, Spectrum({1.0})), InputError);
  EXPECT_THROW(MakeCanonicalModel(b, -0.1, Spectrum({1.0})), InputError);
  EXPECT_THROW(MakeCanonicalModel(b, 0.5, Spectrum({0.5, 1.0})), InputError);
  EXPECT_THROW(MakeCanonicalModel(b, 0.5, Spectrum({1, 1, 1, 1, 1, 1})), InputError);
}

TEST(SampleTest, Deterministic) {
  const ProcessModel m = BuildModel(ModelConfig{});
  const SamplePair a = SamplePairs(m, 3, 42);
  const SamplePair b = SamplePairs(m, 3, 42);
  EXPECT_EQ(a.x.values(), b.x.values());
  EXPECT_EQ(a.y.values(), b.y.values());
  EXPECT_NE(a.x.values(), SamplePairs(m, 3, 43).x.values());
}

TEST(SampleTest, StudentTailsAreHeavy) {
  TailSpec tail;
  tail.kind = TailKind::kStudentT;
  tail.df = 3.0;
  const ProcessModel m = MakeCanonicalModel(Fourier(5), 0.5, Spectrum({1.0, 0.5}), 1, tail);
  const MatrixXd s = SampleScores(m, 20000, 7);
  const VectorXd c = s.col(0).array() - s.col(0).mean();
  const double m2 = c.array().square().mean();
  const double m4 = c.array().pow(4).mean();
  EXPECT_GT(m4 / (m2 * m2), 3.0);
}

TEST(SampleTest, MeanCurveRecovered) {
  const BasisSystem b = Fourier(5);
  VectorXd mean_x = VectorXd::Zero(5);
  mean_x[0] = 2.0;
  mean_x[2] = -1.0;
  MatrixXd cov = MatrixXd::Identity(2, 2);
  cov(0, 1) = cov(1, 0) = 0.3;
  const ProcessModel m(b, {1}, cov, TailSpec{}, mean_x, VectorXd::Zero(5));
  const SamplePair s = SamplePairs(m, 20000, 8);
  const VectorXd sample_mean = s.x.values().colwise().mean().transpose();
  const VectorXd truth = b.eval().transpose() * mean_x;
  // Pointwise sd of a curve is at most sqrt(2 / 24) per unit score variance.
  EXPECT_LT((sample_mean - truth).cwiseAbs().maxCoeff(), 5.0 * std::sqrt(2.0 / 24.0 / 20000.0));
}

TEST(ContaminationTest, CountsAndIdentity) {
  const ProcessModel m = BuildModel(ModelConfig{});
  const SamplePair s = SamplePairs(m, 100, 9);
  ContaminationModel c = DefaultContamination(m);
  c.fraction = 0.0;
  const ContaminatedPair none = Contaminate(s, c, 1);
  EXPECT_TRUE(none.rows.empty());
  EXPECT_EQ(none.samples.x.values(), s.x.values());

  c.fraction = 0.1;
  const ContaminatedPair some = Contaminate(s, c, 1);
  ASSERT_EQ(some.rows.size(), 10u);
  int changed = 0;
  for (Index i = 0; i < 100; ++i) changed += some.samples.x.values().row(i) != s.x.values().row(i) ? 1 : 0;
  EXPECT_EQ(changed, 10);
  EXPECT_EQ(some.samples.x.values().row(some.rows[0]), (c.magnitude * c.shape).transpose());

  c.fraction = 0.5;
  EXPECT_THROW(Contaminate(s, c, 1), InputError);
  c.fraction = 0.49;
  EXPECT_EQ(Contaminate(s, c, 1).rows.size(), 49u);
}

TEST(ContaminationTest, ScoreShiftAndTargets) {
  const ProcessModel m = BuildModel(ModelConfig{});
  const SamplePair s = SamplePairs(m, 40, 10);
  ContaminationModel c = DefaultContamination(m);
  c.kind = ContaminationKind::kScoreShift;
  c.target = ContaminationTarget::kY;
  const ContaminatedPair out = Contaminate(s, c, 2);
  EXPECT_EQ(out.samples.x.values(), s.x.values());
  const Index r = out.rows[0];
  EXPECT_LT((out.samples.y.values().row(r) - s.y.values().row(r) - (c.magnitude * c.shape).transpose())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

// A high-frequency outlier on X alone is invisible to the cross-covariance,
// so the outliers sit on the leading canonical curve instead.
TEST(ContaminationTest, ClassicalBreaksBeforeRobust) {
  const ProcessModel m = BuildModel(ModelConfig{});
  const BasisSystem fit = Fourier(9);
  ContaminationModel c = DefaultContamination(m);
  c.magnitude = 50.0;
  c.shape = m.basis().eval().transpose() * m.true_phi();
  c.target = ContaminationTarget::kX;
  const double tau = std::pow(200.0, -1.0 / 3.0);
  const VectorXd phi = ProjectCoefficients(fit, m.basis(), m.true_phi());
  int wins = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const ContaminatedPair data = Contaminate(SamplePairs(m, 200, DeriveSeed(11, 0, rep)), c, rep);
    const MatrixXd sx = ProjectSample(data.samples.x, fit);
    const MatrixXd sy = ProjectSample(data.samples.y, fit);
    AssociationSpec classical;
    classical.kind = AssociationKind::kCovPearson;
    const SccaFit a = FitClassical(MakeContext(sx, sy, fit, classical, tau, tau));
    RobustOptions opt = StudyRobustOptions();
    opt.seed = rep;
    const SccaFit b = FitRobust(MakeContext(sx, sy, fit, AssociationSpec{}, tau, tau), opt);
    wins += oracle::AngleDeg(a.phi.coef, phi, fit.gram()) > oracle::AngleDeg(b.phi.coef, phi, fit.gram());
  }
  EXPECT_GE(wins, 40);
}

TEST(EllipticalTest, AngleShrinksWithN) {
  ModelConfig mc;
  mc.tail.kind = TailKind::kStudentT;
  mc.tail.df = 5.0;
  const ProcessModel m = BuildModel(mc);
  const BasisSystem fit = Fourier(5);
  const VectorXd phi = ProjectCoefficients(fit, m.basis(), m.true_phi());
  std::vector<double> medians;
  for (Index n : {200, 800, 3200}) {
    std::vector<double> angles;
    for (int rep = 0; rep < 15; ++rep) {
      const SamplePair s = SamplePairs(m, n, DeriveSeed(12, static_cast<std::uint64_t>(n), rep));
      const double tau = std::pow(static_cast<double>(n), -1.0 / 3.0);
      RobustOptions opt = StudyRobustOptions();
      opt.seed = rep;
      const SccaFit f = FitRobust(
          MakeContext(ProjectSample(s.x, fit), ProjectSample(s.y, fit), fit, AssociationSpec{}, tau, tau), opt);
      angles.push_back(oracle::AngleDeg(f.phi.coef, phi, fit.gram()));
    }
    medians.push_back(oracle::SortedMedian(angles));
  }
  EXPECT_GT(medians[0], medians[1]);
  EXPECT_GT(medians[1], medians[2]);
}

TEST(SeedTest, DerivedSeedsDiffer) {
  EXPECT_NE(DeriveSeed(1, 0, 0), DeriveSeed(1, 0, 1));
  EXPECT_NE(DeriveSeed(1, 0, 0), DeriveSeed(1, 1, 0));
  EXPECT_EQ(DeriveSeed(5, 2, 3), DeriveSeed(5, 2, 3));
}

TEST(PopulationCcaTest, MatchesOracle) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal;
  MatrixXd a(6, 10);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 10; ++j) a(i, j) = normal(rng);
  }
  const MatrixXd cov = a * a.transpose() / 10.0;
  const PopulationCca p = SolvePopulationCca(cov, 3);
  EXPECT_NEAR(p.lambda, oracle::PopulationLambda(cov, 3), 1e-10);
  EXPECT_NEAR(p.a.dot(cov.topLeftCorner(3, 3) * p.a), 1.0, 1e-10);
}

}  // namespace
}  // namespace rscca
