#ifndef RSCCA_FUNCTION_SPACE_H_
#define RSCCA_FUNCTION_SPACE_H_

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace rscca {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Observation grid t_1 < ... < t_m on [a, b] with trapezoidal weights.
class Grid {
 public:
  // Validates ordering and size (m >= 4); weights follow the trapezoid rule.
  explicit Grid(VectorXd points);

  const VectorXd& points() const { return points_; }
  const VectorXd& weights() const { return weights_; }
  double lower() const { return points_[0]; }
  double upper() const { return points_[points_.size() - 1]; }
  double length() const { return upper() - lower(); }
  Index size() const { return points_.size(); }

  // Same abscissae up to 1e-12 relative to the interval length.
  bool SameAs(const Grid& other) const;

 private:
  VectorXd points_;
  VectorXd weights_;
};

// Equispaced grid on [a, b] with m points.
Grid BuildGrid(double a, double b, Index m);

// Parses "a:b:m".
Grid ParseGridSpec(std::string_view text);

// n curves observed on a shared grid; row i holds curve i.
class FunctionalSample {
 public:
  FunctionalSample(Grid grid, MatrixXd values);

  const Grid& grid() const { return grid_; }
  const MatrixXd& values() const { return values_; }
  Index n() const { return values_.rows(); }

 private:
  Grid grid_;
  MatrixXd values_;
};

enum class BasisKind { kFourier, kBSpline };

std::string_view ToString(BasisKind kind);
BasisKind ParseBasisKind(std::string_view text);

// A finite basis evaluated on a grid, with its Gram matrix J = <xi_i, xi_j>
// and roughness penalty R = <xi_i'', xi_j''>, both by trapezoidal quadrature.
//
// Fourier: xi_1 = 1/sqrt(L), then sqrt(2/L) sin(w_k (t - a)),
// sqrt(2/L) cos(w_k (t - a)) with w_k = 2 pi k / L, for odd d.
// B-spline: clamped cubic splines with d - 4 equispaced interior knots.
class BasisSystem {
 public:
  BasisKind kind() const { return kind_; }
  Index dim() const { return eval_.rows(); }
  const Grid& grid() const { return grid_; }
  // d x m matrices of xi_j(t_k) and xi_j''(t_k).
  const MatrixXd& eval() const { return eval_; }
  const MatrixXd& eval_dd() const { return eval_dd_; }
  const MatrixXd& gram() const { return gram_; }
  const MatrixXd& penalty() const { return penalty_; }

 private:
  friend BasisSystem BuildBasis(BasisKind kind, Index d, const Grid& grid);
  BasisSystem(BasisKind kind, Grid grid, MatrixXd eval, MatrixXd eval_dd);

  BasisKind kind_;
  Grid grid_;
  MatrixXd eval_;
  MatrixXd eval_dd_;
  MatrixXd gram_;
  MatrixXd penalty_;
};

BasisSystem BuildBasis(BasisKind kind, Index d, const Grid& grid);

// n x d matrix of quadrature inner products <X_i, xi_j>.
MatrixXd ProjectSample(const FunctionalSample& sample, const BasisSystem& basis);

enum class NormConvention { kL2Unit, kPenalizedUnit };

// Coefficients of a direction u = sum_j coef_j xi_j in a basis.
struct Direction {
  VectorXd coef;
  NormConvention convention = NormConvention::kL2Unit;
};

// coef' R coef, clamped at zero against rounding.
double Roughness(const BasisSystem& basis, const VectorXd& coef);

// scale_sq + tau * Psi(u).
double PenalizedNormSq(const BasisSystem& basis, const Direction& u,
                       double scale_sq, double tau);

struct PenaltyNullspace {
  // Columns: orthonormal eigenvectors of R with eigenvalue < rel_tol * max.
  MatrixXd basis;
  // min u'Ru / u'Ju over u J-orthogonal to the null space; +inf when the
  // null space is everything.
  double coercivity = 0.0;
};

PenaltyNullspace ComputePenaltyNullspace(const BasisSystem& basis, double rel_tol);

// Curve values sum_j coef_j xi_j(t_k) on the basis grid.
VectorXd EvaluateCurve(const BasisSystem& basis, const VectorXd& coef);

// <xi^a_i, xi^b_j> for two bases on the same grid.
MatrixXd CrossGram(const BasisSystem& a, const BasisSystem& b);

// L2 projection of a function given in basis `from` onto the span of `to`.
VectorXd ProjectCoefficients(const BasisSystem& to, const BasisSystem& from,
                             const VectorXd& coef);

}  // namespace rscca

#endif  // RSCCA_FUNCTION_SPACE_H_
