#include "rscca/simulation.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "rscca/error.h"

namespace rscca {
namespace {

// Symmetric square root of a PSD matrix; tiny negative eigenvalues are zeroed.
MatrixXd PsdRoot(const MatrixXd& cov) {
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  const VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return SplitMix64(SplitMix64(SplitMix64(master) ^ stream) ^ index);
}

PopulationCca SolvePopulationCca(const MatrixXd& score_cov, Index k) {
  if (score_cov.rows() != 2 * k || score_cov.cols() != 2 * k) {
    throw InputError("score covariance must be 2K x 2K");
  }
  const MatrixXd sxx = score_cov.topLeftCorner(k, k);
  const MatrixXd syy = score_cov.bottomRightCorner(k, k);
  const MatrixXd sxy = score_cov.topRightCorner(k, k);
  const Eigen::LLT<MatrixXd> lx(sxx);
  const Eigen::LLT<MatrixXd> ly(syy);
  if (lx.info() != Eigen::Success || ly.info() != Eigen::Success) {
    throw InputError("score covariance blocks must be positive definite");
  }
  const MatrixXd left = lx.matrixL().solve(sxy);
  const MatrixXd whitened = ly.matrixL().solve(left.transpose()).transpose();
  const Eigen::JacobiSVD<MatrixXd> svd(whitened, Eigen::ComputeFullU | Eigen::ComputeFullV);
  PopulationCca out;
  const double s = svd.singularValues()[0];
  out.lambda = s * s;
  out.a = lx.matrixU().solve(svd.matrixU().col(0));
  out.b = ly.matrixU().solve(svd.matrixV().col(0));
  // Fix the sign so the covariance of the canonical variates is nonnegative.
  if (out.a.dot(sxy * out.b) < 0.0) out.b = -out.b;
  Index largest = 0;
  out.a.cwiseAbs().maxCoeff(&largest);
  if (out.a[largest] < 0.0) {
    out.a = -out.a;
    out.b = -out.b;
  }
  return out;
}

ProcessModel::ProcessModel(BasisSystem basis, std::vector<Index> components, MatrixXd score_cov,
                           TailSpec tail, VectorXd mean_x, VectorXd mean_y)
    : basis_(std::move(basis)),
      components_(std::move(components)),
      score_cov_(std::move(score_cov)),
      tail_(tail),
      mean_x_(std::move(mean_x)),
      mean_y_(std::move(mean_y)) {
  const Index k = num_scores();
  const Index d = basis_.dim();
  if (k < 1) throw InputError("process model needs at least one score");
  for (Index c : components_) {
    if (c < 0 || c >= d) throw InputError("component index outside the generator basis");
  }
  if (mean_x_.size() != d || mean_y_.size() != d) {
    throw InputError("mean coefficient vectors must match the generator basis dimension");
  }
  if (tail_.kind == TailKind::kStudentT && !(tail_.df > 0.0)) {
    throw InputError("t tails need positive degrees of freedom");
  }
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(score_cov_);
  if ((score_cov_ - score_cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
      eig.eigenvalues().minCoeff() < -1e-10) {
    throw InputError("score covariance must be symmetric positive semi-definite");
  }

  const PopulationCca cca = SolvePopulationCca(score_cov_, k);
  rho0_ = std::sqrt(std::max(0.0, cca.lambda));
  // Scores enter through <u, X> = u' J E s; the direction with E'J u = a
  // inside the process span is u = E (E'JE)^{-1} a.
  MatrixXd e = MatrixXd::Zero(d, k);
  for (Index j = 0; j < k; ++j) e(components_[static_cast<size_t>(j)], j) = 1.0;
  const MatrixXd inner = e.transpose() * basis_.gram() * e;
  auto lift = [&](const VectorXd& w) {
    VectorXd u = e * inner.ldlt().solve(w);
    return VectorXd(u / std::sqrt(u.dot(basis_.gram() * u)));
  };
  true_phi_ = lift(cca.a);
  true_psi_ = lift(cca.b);
}

MatrixXd ProcessModel::Loadings(const BasisSystem& fit) const {
  const MatrixXd cross = CrossGram(fit, basis_);
  MatrixXd out(fit.dim(), num_scores());
  for (Index j = 0; j < num_scores(); ++j) out.col(j) = cross.col(components_[static_cast<size_t>(j)]);
  return out;
}

ProcessModel MakeCanonicalModel(const BasisSystem& basis, double rho0, const VectorXd& spectrum,
                                Index leading, TailSpec tail) {
  if (!(rho0 >= 0.0 && rho0 <= 1.0)) throw InputError("rho0 must lie in [0, 1]");
  const Index k = spectrum.size();
  if (k < 1 || k > basis.dim()) {
    throw InputError("spectrum length must lie in [1, basis dimension]");
  }
  for (Index j = 0; j < k; ++j) {
    if (!(spectrum[j] > 0.0) || (j > 0 && spectrum[j] > spectrum[j - 1])) {
      throw InputError("spectrum must be positive and nonincreasing");
    }
  }
  if (leading < 0 || leading >= basis.dim()) throw InputError("leading index outside the basis");

  std::vector<Index> components{leading};
  for (Index j = 0; j < basis.dim() && static_cast<Index>(components.size()) < k; ++j) {
    if (j != leading) components.push_back(j);
  }
  MatrixXd cov = MatrixXd::Zero(2 * k, 2 * k);
  cov.topLeftCorner(k, k) = spectrum.asDiagonal();
  cov.bottomRightCorner(k, k) = spectrum.asDiagonal();
  cov(0, k) = cov(k, 0) = rho0 * spectrum[0];

  const Index d = basis.dim();
  ProcessModel model(basis, components, cov, tail, VectorXd::Zero(d), VectorXd::Zero(d));

  if (std::abs(model.lambda0() - rho0 * rho0) > 1e-10) {
    throw NumericalError("canonical model verification failed for rho0");
  }
  if (rho0 > 0.0) {
    // With ties in the canonical correlations the direction is not unique;
    // only check it when the first pair is separated.
    VectorXd expected = VectorXd::Zero(d);
    expected[leading] = 1.0;
    expected /= std::sqrt(expected.dot(basis.gram() * expected));
    const double cos_x = std::abs(model.true_phi().dot(basis.gram() * expected));
    const double cos_y = std::abs(model.true_psi().dot(basis.gram() * expected));
    if (1.0 - cos_x > 1e-8 || 1.0 - cos_y > 1e-8) {
      throw NumericalError("canonical model verification failed for the first directions");
    }
  }
  return model;
}

MatrixXd SampleScores(const ProcessModel& model, Index n, std::uint64_t seed) {
  if (n < 2) throw InputError("need at least two sampled pairs");
  const Index p = model.score_cov().rows();
  const MatrixXd root = PsdRoot(model.score_cov());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(model.tail().df);
  MatrixXd z(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
    if (model.tail().kind == TailKind::kStudentT) {
      z.row(i) /= std::sqrt(chi2(rng) / model.tail().df);
    }
  }
  return z * root;
}

SamplePair SamplePairs(const ProcessModel& model, Index n, std::uint64_t seed) {
  const MatrixXd scores = SampleScores(model, n, seed);
  const Index k = model.num_scores();
  const BasisSystem& basis = model.basis();
  MatrixXd comp(k, basis.grid().size());
  for (Index j = 0; j < k; ++j) comp.row(j) = basis.eval().row(model.components()[static_cast<size_t>(j)]);
  const VectorXd mean_x = EvaluateCurve(basis, model.mean_x());
  const VectorXd mean_y = EvaluateCurve(basis, model.mean_y());
  MatrixXd x = scores.leftCols(k) * comp;
  MatrixXd y = scores.rightCols(k) * comp;
  x.rowwise() += mean_x.transpose();
  y.rowwise() += mean_y.transpose();
  return {FunctionalSample(basis.grid(), std::move(x)), FunctionalSample(basis.grid(), std::move(y))};
}

void Validate(const ContaminationModel& model) {
  if (!(model.fraction >= 0.0 && model.fraction < 0.5)) {
    throw InputError("contamination fraction must lie in [0, 0.5)");
  }
  if (!std::isfinite(model.magnitude)) throw InputError("contamination magnitude must be finite");
}

VectorXd SineShape(const Grid& grid, int frequency) {
  const VectorXd& t = grid.points();
  VectorXd out(t.size());
  for (Index k = 0; k < t.size(); ++k) {
    out[k] = std::sin(2.0 * std::numbers::pi * frequency * (t[k] - grid.lower()) / grid.length());
  }
  return out;
}

ContaminationModel DefaultContamination(const ProcessModel& model) {
  const Index k = model.num_scores();
  const double top = model.score_cov().diagonal().head(k).maxCoeff();
  ContaminationModel out;
  out.magnitude = 10.0 * std::sqrt(top);
  out.shape = SineShape(model.basis().grid(), 4);
  return out;
}

ContaminatedPair Contaminate(const SamplePair& samples, const ContaminationModel& model,
                             std::uint64_t seed) {
  Validate(model);
  const Index n = samples.x.n();
  const Index m = samples.x.grid().size();
  if (model.shape.size() != m) throw InputError("contamination shape does not match the grid");
  const auto count = static_cast<Index>(std::floor(model.fraction * static_cast<double>(n) + 1e-9));

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Index> rows(order.begin(), order.begin() + count);
  std::sort(rows.begin(), rows.end());

  MatrixXd x = samples.x.values();
  MatrixXd y = samples.y.values();
  const Eigen::RowVectorXd curve = model.magnitude * model.shape.transpose();
  auto alter = [&](MatrixXd& values, Index row) {
    if (model.kind == ContaminationKind::kCurveReplacement) {
      values.row(row) = curve;
    } else {
      values.row(row) += curve;
    }
  };
  for (Index r : rows) {
    if (model.target != ContaminationTarget::kY) alter(x, r);
    if (model.target != ContaminationTarget::kX) alter(y, r);
  }
  return {{FunctionalSample(samples.x.grid(), std::move(x)),
           FunctionalSample(samples.y.grid(), std::move(y))},
          std::move(rows)};
}

}  // namespace rscca
