#ifndef RSCCA_SCCA_H_
#define RSCCA_SCCA_H_

#include <cstdint>
#include <string>
#include <vector>

#include "rscca/function_space.h"
#include "rscca/robust_measures.h"

namespace rscca {

struct SmoothingParams {
  double tau_x = 0.0;
  double tau_y = 0.0;
  Index d = 0;
};

// Everything the penalized association objective needs, in the score domain.
// Both blocks share one basis (gram J and penalty R).
struct ObjectiveContext {
  MatrixXd scores_x;
  MatrixXd scores_y;
  MatrixXd gram;
  MatrixXd penalty;
  AssociationSpec spec;
  SmoothingParams smoothing;

  // Throws InputError on inconsistent shapes or negative smoothing.
  void Validate() const;
  Index n() const { return scores_x.rows(); }
  Index dim() const { return scores_x.cols(); }
};

ObjectiveContext MakeContext(const MatrixXd& scores_x, const MatrixXd& scores_y,
                             const BasisSystem& basis, const AssociationSpec& spec,
                             double tau_x, double tau_y);

// gamma^2 / ((sigma_u^2 + tau_x a'Ra)(sigma_v^2 + tau_y b'Rb)) for the
// projections scores_x a and scores_y b; 0 when a margin is degenerate.
double Objective(const VectorXd& alpha, const VectorXd& beta, const ObjectiveContext& ctx);

// Same ratio from an already computed co-association and roughness values.
double PenalizedRatio(const Coassociation& c, double tau_x, double rough_x, double tau_y,
                      double rough_y);

// Divides by the J-norm and makes the largest-magnitude coefficient positive.
// Throws InputError for a zero vector.
Direction NormalizeL2(const VectorXd& coef, const MatrixXd& gram);

struct RestartRecord {
  std::string origin;
  std::vector<double> sweep_objective;  // objective after each full sweep
  double start_objective = 0.0;
  double final_objective = 0.0;
  long evaluations = 0;
  bool degenerate = false;
  VectorXd alpha;
  VectorXd beta;
};

struct FitTrace {
  std::vector<RestartRecord> restarts;
  int best_restart = -1;
};

struct SccaFit {
  std::string method;
  Direction phi;
  Direction psi;
  // Same directions rescaled so that s^2(u) + tau Psi(u) = 1 (sample scale).
  Direction phi_penalized_unit;
  Direction psi_penalized_unit;
  double lambda_hat = 0.0;
  double assoc_unpenalized = 0.0;
  FitTrace trace;
  AssociationSpec spec;
  SmoothingParams smoothing;
  std::uint64_t seed = 0;
};

// Penalized classical SCCA: whitening by C_xx + tau_x R and C_yy + tau_y R
// followed by an SVD of the whitened cross-covariance. Requires
// spec.kind == cov_pearson; throws NumericalError on a singular block.
SccaFit FitClassical(const ObjectiveContext& ctx);

struct RobustOptions {
  int random_starts = 10;
  std::uint64_t seed = 0;
  double gain_tol = 1e-8;
  int max_sweeps = 100;
  int max_evals_per_half = 2000;
  bool classical_start = true;
  bool principal_start = true;
  double initial_step = 0.3;
  // Simplex size at which a half-step search stops.
  double step_tol = 1e-9;
};

// Alternating maximization over the two J-unit spheres with a Nelder-Mead
// search in the tangent chart of the current point, from several starts.
// Throws NumericalError when every restart ends on a degenerate projection.
SccaFit FitRobust(const ObjectiveContext& ctx, const RobustOptions& options = {});

enum class FitMethod { kAuto, kClassical, kRobust };

// kAuto: spectral solver for cov_pearson, alternating search otherwise.
SccaFit Fit(const ObjectiveContext& ctx, const RobustOptions& options = {},
            FitMethod method = FitMethod::kAuto);

struct TauCell {
  double tau = 0.0;
  std::vector<double> heldout;  // unpenalized association per fold
  int failed_folds = 0;
  double mean_heldout = 0.0;
  bool usable = false;
};

struct TauSelection {
  double tau = 0.0;
  std::vector<TauCell> table;  // one row per distinct grid value, ascending
};

// K-fold choice of tau (applied to both blocks). Folds come from a seeded
// permutation; ties go to the larger tau.
TauSelection SelectTau(const ObjectiveContext& ctx, std::vector<double> tau_grid, int folds,
                       const RobustOptions& options = {}, FitMethod method = FitMethod::kAuto);

}  // namespace rscca

#endif  // RSCCA_SCCA_H_
