#ifndef RSCCA_SIMULATION_H_
#define RSCCA_SIMULATION_H_

#include <cstdint>
#include <vector>

#include "rscca/function_space.h"

namespace rscca {

enum class TailKind { kGaussian, kStudentT };

// Gaussian scores, or Gaussian scores divided by one sqrt(chi2_df / df)
// draw per observation (shared by X and Y), which keeps the pair elliptical.
struct TailSpec {
  TailKind kind = TailKind::kGaussian;
  double df = 5.0;
};

// Population canonical pair of a score covariance [[Sxx, Sxy], [Syx, Syy]].
struct PopulationCca {
  double lambda = 0.0;  // squared first canonical correlation
  VectorXd a;           // X-score weights, unit Sxx-variance
  VectorXd b;
};

// Throws InputError when a diagonal block is not positive definite.
PopulationCca SolvePopulationCca(const MatrixXd& score_cov, Index k);

// Paired processes X = mean_x + sum_k sx_k xi_{c_k}, Y likewise, with joint
// scores (sx, sy) of covariance score_cov. The canonical labels are always
// derived from score_cov, so they cannot disagree with it.
class ProcessModel {
 public:
  // components[k] is the generator basis index carrying score k.
  ProcessModel(BasisSystem basis, std::vector<Index> components, MatrixXd score_cov,
               TailSpec tail, VectorXd mean_x, VectorXd mean_y);

  const BasisSystem& basis() const { return basis_; }
  const std::vector<Index>& components() const { return components_; }
  const MatrixXd& score_cov() const { return score_cov_; }
  const TailSpec& tail() const { return tail_; }
  const VectorXd& mean_x() const { return mean_x_; }
  const VectorXd& mean_y() const { return mean_y_; }
  Index num_scores() const { return static_cast<Index>(components_.size()); }

  // Generator-basis coefficients of the first canonical directions (J-unit).
  const VectorXd& true_phi() const { return true_phi_; }
  const VectorXd& true_psi() const { return true_psi_; }
  double rho0() const { return rho0_; }
  double lambda0() const { return rho0_ * rho0_; }

  // d_fit x K matrix mapping scores to inner products <xi^fit_j, X - mean>.
  MatrixXd Loadings(const BasisSystem& fit) const;

 private:
  BasisSystem basis_;
  std::vector<Index> components_;
  MatrixXd score_cov_;
  TailSpec tail_;
  VectorXd mean_x_;
  VectorXd mean_y_;
  VectorXd true_phi_;
  VectorXd true_psi_;
  double rho0_ = 0.0;
};

// Diagonal X and Y score covariances equal to `spectrum`, with correlation
// rho0 between the first X and Y scores only. Score 0 sits on basis function
// `leading`, the others on the remaining functions in increasing order.
// The derived canonical pair is checked against (e_leading, rho0^2).
ProcessModel MakeCanonicalModel(const BasisSystem& basis, double rho0, const VectorXd& spectrum,
                                Index leading = 1, TailSpec tail = {});

struct SamplePair {
  FunctionalSample x;
  FunctionalSample y;
};

// Deterministic in (model, n, seed).
SamplePair SamplePairs(const ProcessModel& model, Index n, std::uint64_t seed);

// Scores only (n x 2K), before synthesis; used by tests and metrics.
MatrixXd SampleScores(const ProcessModel& model, Index n, std::uint64_t seed);

enum class ContaminationKind { kCurveReplacement, kScoreShift };
enum class ContaminationTarget { kX, kY, kBoth };

struct ContaminationModel {
  double fraction = 0.1;
  ContaminationKind kind = ContaminationKind::kCurveReplacement;
  ContaminationTarget target = ContaminationTarget::kBoth;
  double magnitude = 10.0;
  VectorXd shape;  // curve on the sample grid
};

void Validate(const ContaminationModel& model);

// Sine of `frequency` full periods over the grid interval, amplitude 1.
VectorXd SineShape(const Grid& grid, int frequency);

// fraction 0.1, curve replacement of both X and Y rows by
// 10 sqrt(max spectrum) sin(2 pi 4 (t - a) / L).
ContaminationModel DefaultContamination(const ProcessModel& model);

struct ContaminatedPair {
  SamplePair samples;
  std::vector<Index> rows;  // altered rows, ascending
};

// Alters floor(fraction * n) rows chosen without replacement.
ContaminatedPair Contaminate(const SamplePair& samples, const ContaminationModel& model,
                             std::uint64_t seed);

// SplitMix64 mix of a master seed with a stream and an index.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

}  // namespace rscca

#endif  // RSCCA_SIMULATION_H_
