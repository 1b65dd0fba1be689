#ifndef RSCCA_EXPERIMENTS_H_
#define RSCCA_EXPERIMENTS_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rscca/metrics.h"
#include "rscca/scca.h"
#include "rscca/simulation.h"

namespace rscca {

// Generator model on an equispaced grid. The default interval [0, 24] keeps
// the roughness of the first sine, (2 pi / 24)^4 ~ 4.7e-3, on the scale of
// the score variances.
struct ModelConfig {
  double a = 0.0;
  double b = 24.0;
  Index m = 101;
  BasisKind generator_kind = BasisKind::kFourier;
  Index generator_d = 15;
  double rho0 = 0.7;
  std::vector<double> spectrum{1.0, 0.9, 0.8};
  Index leading = 1;
  TailSpec tail;
};

ProcessModel BuildModel(const ModelConfig& config);

// Lighter search budget for simulation studies: one random start, 200
// evaluations per half-step, sweeps stop at a gain of 1e-5 or after 10.
RobustOptions StudyRobustOptions();

struct ConsistencyConfig {
  ModelConfig model;
  BasisKind fit_kind = BasisKind::kFourier;
  std::vector<Index> n_schedule{100, 400, 1600};
  // tau_n = tau_scale * n^tau_exponent, the same for both blocks.
  double tau_scale = 1.0;
  double tau_exponent = -1.0 / 3.0;
  bool penalty_regime = true;
  Index penalty_d = 15;
  bool sieve_regime = true;
  // d_n = ceil(sieve_scale * n^sieve_exponent), raised to the next odd
  // number for the Fourier basis.
  double sieve_scale = 2.0;
  double sieve_exponent = 0.25;
  std::vector<AssociationSpec> specs{AssociationSpec{}};
  int replicates = 50;
  std::uint64_t seed = 1;
  RobustOptions robust = StudyRobustOptions();
  // Random directions for the discrepancy diagnostics; 0 skips them.
  int discrepancy_dirs = 0;
};

void Validate(const ConsistencyConfig& config);

Index SieveDimension(const ConsistencyConfig& config, Index n);

struct ConsistencyRow {
  std::string regime;  // "penalty" or "sieve"
  Index n = 0;
  double tau = 0.0;
  Index d = 0;
  int spec_index = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string message;
  double lambda_hat = 0.0;
  double lambda_err = 0.0;
  double lx = 0.0;
  double ly = 0.0;
  double angle_x = 0.0;
  double angle_y = 0.0;
  double tau_psi_proj = 0.0;  // tau_n Psi of phi_1 projected on the fitting span
  double c_x = 0.0;
  double c_y = 0.0;
  double c_xy = 0.0;
};

struct ConsistencySummary {
  std::string regime;
  Index n = 0;
  double tau = 0.0;
  Index d = 0;
  int spec_index = 0;
  int failures = 0;
  Summary lx;
  Summary ly;
  Summary lambda_err;
  Summary angle_x;
  Summary angle_y;
  Summary c_x;
  double tau_psi_proj = 0.0;
};

struct ConsistencyReport {
  ConsistencyConfig config;
  double lambda0 = 0.0;
  std::vector<ConsistencyRow> rows;
  std::vector<ConsistencySummary> summaries;
};

using Progress = std::function<void(const std::string&)>;

// Simulation x fit x metrics over the n schedule, both regimes and all specs.
// Data are shared across specs and regimes for the same (n, replicate).
// Failed fits are recorded in their row and the run continues.
ConsistencyReport RunConsistency(const ConsistencyConfig& config, const Progress& progress = {});

struct RobustnessConfig {
  ModelConfig model;
  BasisKind fit_kind = BasisKind::kFourier;
  Index d = 11;
  Index n = 400;
  double tau_scale = 1.0;
  double tau_exponent = -1.0 / 3.0;
  std::vector<double> fractions{0.0, 0.1};
  ContaminationKind kind = ContaminationKind::kCurveReplacement;
  ContaminationTarget target = ContaminationTarget::kBoth;
  // NaN selects 10 sqrt(max spectrum).
  double magnitude = std::numeric_limits<double>::quiet_NaN();
  int shape_frequency = 4;
  std::vector<AssociationSpec> specs;
  int replicates = 50;
  std::uint64_t seed = 1;
  RobustOptions robust = StudyRobustOptions();
};

// Defaults for specs when left empty: cov_pearson, gk_bounded/MAD, m_scatter.
std::vector<AssociationSpec> DefaultRobustnessSpecs();

void Validate(const RobustnessConfig& config);

struct RobustnessRow {
  double fraction = 0.0;
  int spec_index = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string message;
  double angle_x = 0.0;
  double angle_y = 0.0;
  double lambda_hat = 0.0;
  double lambda_bias = 0.0;
};

struct RobustnessSummary {
  double fraction = 0.0;
  int spec_index = 0;
  int failures = 0;
  Summary angle_x;
  Summary angle_y;
  Summary lambda_bias;
  // Share of paired replicates where angle_x is below the classical one;
  // NaN when no cov_pearson spec is present.
  double win_rate_vs_classical = 0.0;
};

struct RobustnessReport {
  RobustnessConfig config;
  double lambda0 = 0.0;
  std::vector<RobustnessRow> rows;
  std::vector<RobustnessSummary> summaries;
};

RobustnessReport RunRobustness(const RobustnessConfig& config, const Progress& progress = {});

}  // namespace rscca

#endif  // RSCCA_EXPERIMENTS_H_
