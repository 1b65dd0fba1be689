#ifndef RSCCA_METRICS_H_
#define RSCCA_METRICS_H_

#include <cstdint>
#include <vector>

#include "rscca/function_space.h"
#include "rscca/robust_measures.h"
#include "rscca/simulation.h"

namespace rscca {

struct MetricValue {
  double value = 0.0;
  bool degenerate = false;
};

// Squared association between the projections scores * u1 and scores * u2 of
// one sample. Reported as 0 with the flag set when a projection is degenerate.
MetricValue LxMetric(const VectorXd& u1, const VectorXd& u2, const MatrixXd& scores,
                     const AssociationSpec& spec);

// (u' G v)^2 / (u' G u)(v' G v): the squared correlation of two projections
// under a covariance G, which every Fisher-consistent association reproduces
// at an elliptical law.
double PopulationSquaredCorrelation(const VectorXd& u, const VectorXd& v, const MatrixXd& g);

// Principal angle in degrees between span{u} and span{v} in the metric J.
double AngleDegrees(const VectorXd& u, const VectorXd& v, const MatrixXd& gram);

// Population second moments of the fitting-basis scores under a model:
// Var<u, X> = u' xx u, Cov(<u, X>, <v, Y>) = u' xy v.
struct PopulationMoments {
  MatrixXd xx;
  MatrixXd yy;
  MatrixXd xy;
};

PopulationMoments ComputePopulationMoments(const ProcessModel& model, const BasisSystem& fit);

// Constant c with sigma^2(<u, X>) = c u' Gamma u for the spec's scale at the
// model's elliptical law: 1 for calibrated scales at Gaussian tails, df/(df-2)
// for cov_pearson with t tails, otherwise a Monte-Carlo estimate on 200000
// draws.
double EllipticalScaleFactor(const AssociationSpec& spec, const TailSpec& tail, std::uint64_t seed);

struct DiscrepancyEstimate {
  double c_x = 0.0;
  double c_y = 0.0;
  double c_xy = 0.0;
  int directions = 0;
};

// Monte-Carlo lower bounds of
//   sup |s_n^2(u) - sigma^2(u)|, sup |s_n^2(v) - sigma^2(v)|,
//   sup |g_n(u, v) - gamma(u, v)|
// over random directions normalized to sigma^2(u) + tau Psi(u) = 1, plus any
// extra (fitted) directions. Not an exact supremum.
DiscrepancyEstimate DiscrepancySuprema(const MatrixXd& scores_x, const MatrixXd& scores_y,
                                       const AssociationSpec& spec, double tau,
                                       const BasisSystem& basis, const PopulationMoments& pop,
                                       double scale_factor, int n_dirs, std::uint64_t seed,
                                       const std::vector<VectorXd>& extra_x = {},
                                       const std::vector<VectorXd>& extra_y = {});

struct Summary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  int count = 0;
};

// Quartiles by linear interpolation between order statistics; NaNs skipped.
Summary Summarize(std::vector<double> values);

}  // namespace rscca

#endif  // RSCCA_METRICS_H_
