#ifndef RSCCA_ROBUST_MEASURES_H_
#define RSCCA_ROBUST_MEASURES_H_

#include <string_view>

#include <Eigen/Dense>

namespace rscca {

using Eigen::Index;
using Eigen::VectorXd;
using VecRef = Eigen::Ref<const VectorXd>;

// 1 / Phi^{-1}(0.75): makes the MAD equal the standard deviation at the normal.
inline constexpr double kMadNormalConsistency = 1.4826022185056018;
// Tukey bisquare tuning giving a 50% breakdown M-scale calibrated at the normal.
inline constexpr double kBisquareTuning = 1.54764;
inline constexpr double kBisquareTarget = 0.5;

enum class ScaleKind { kSd, kMad, kMScale };

struct ScaleSpec {
  ScaleKind kind = ScaleKind::kMad;
  double mad_c = kMadNormalConsistency;
  double mscale_tuning = kBisquareTuning;
  double mscale_b = kBisquareTarget;
};

// Throws InputError when constants are out of range (c <= 0, b outside (0, 0.5]).
void Validate(const ScaleSpec& spec);

enum class AssociationKind { kCovPearson, kGkStar, kGkBounded, kMScatter, kOgk };

// Huber-weight M-scatter constants. Weights cut at the chi-square(2)
// `quantile`; the scatter weight is divided by the normal-consistency factor.
struct MScatterTuning {
  double quantile = 0.9;
  int max_iter = 500;
  double tol = 1e-9;
};

struct AssociationSpec {
  AssociationKind kind = AssociationKind::kGkBounded;
  ScaleSpec scale;
  MScatterTuning scatter;
};

void Validate(const AssociationSpec& spec);

// True for kinds whose association is guaranteed to lie in [-1, 1].
bool IsBounded(AssociationKind kind);

std::string_view ToString(ScaleKind kind);
std::string_view ToString(AssociationKind kind);
ScaleKind ParseScaleKind(std::string_view text);
AssociationKind ParseAssociationKind(std::string_view text);

// Median with the midpoint rule for even n.
double Median(const VecRef& x);

// Location-invariant, scale-equivariant dispersion. Constant input gives 0.
// Throws InputError for fewer than two observations.
double Scale(const VecRef& x, const ScaleSpec& spec);

enum class MarginStatus { kOk, kDegenerate };

struct GkResult {
  MarginStatus status = MarginStatus::kOk;
  double gamma = 0.0;
  // rho_GK when bounded, otherwise rho* = (s+^2 - s-^2) / 4 (not clamped).
  double rho = 0.0;
  double sigma_plus_sq = 0.0;
  double sigma_minus_sq = 0.0;
  double sigma_u = 0.0;
  double sigma_v = 0.0;
};

// Gnanadesikan-Kettenring co-association through the scales of the sum and
// difference of the standardized margins.
GkResult CoassocGk(const VecRef& u, const VecRef& v, const ScaleSpec& scale, bool bounded);

struct BivariateScatter {
  Eigen::Matrix2d w = Eigen::Matrix2d::Zero();
  Eigen::Vector2d location = Eigen::Vector2d::Zero();
  bool converged = false;
  bool regularized = false;
  int iterations = 0;
};

// Simultaneous Huber M-estimate of bivariate location and scatter.
BivariateScatter ScatterM(const VecRef& u, const VecRef& v, const MScatterTuning& tuning = {});

// Orthogonalized GK scatter in two dimensions. Zero marginal scale yields
// a matrix with a zero diagonal entry; callers see it as a degenerate margin.
BivariateScatter ScatterOgk(const VecRef& u, const VecRef& v, const ScaleSpec& scale);

struct AssocValue {
  MarginStatus status = MarginStatus::kOk;
  double rho = 0.0;
};

// W12 / sqrt(W11 W22).
AssocValue AssocFromScatter(const BivariateScatter& scatter);

struct Coassociation {
  MarginStatus status = MarginStatus::kOk;
  double gamma = 0.0;
  double sigma_u = 0.0;
  double sigma_v = 0.0;
  double rho = 0.0;
  // Set when an unbounded kind (gk_star) reports |rho| > 1.
  bool rho_exceeds_unit = false;
};

// Dispatches on spec.kind. Degenerate margins come back with status
// kDegenerate and gamma = rho = 0, never NaN.
Coassociation Coassociate(const VecRef& u, const VecRef& v, const AssociationSpec& spec);

}  // namespace rscca

#endif  // RSCCA_ROBUST_MEASURES_H_
