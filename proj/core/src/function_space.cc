#include "rscca/function_space.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "rscca/error.h"

namespace rscca {
namespace {

VectorXd TrapezoidWeights(const VectorXd& t) {
  const Index m = t.size();
  VectorXd w = VectorXd::Zero(m);
  for (Index k = 0; k + 1 < m; ++k) {
    const double h = 0.5 * (t[k + 1] - t[k]);
    w[k] += h;
    w[k + 1] += h;
  }
  return w;
}

double ParseDouble(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

// Clamped cubic B-spline basis on [a, b] with equispaced interior knots.
class CubicBSpline {
 public:
  CubicBSpline(double a, double b, Index d) : d_(d) {
    const Index interior = d - 4;
    knots_.reserve(static_cast<size_t>(d + 4));
    for (int i = 0; i < 4; ++i) knots_.push_back(a);
    for (Index j = 1; j <= interior; ++j) {
      knots_.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(interior + 1));
    }
    for (int i = 0; i < 4; ++i) knots_.push_back(b);
  }

  // Fills value and second derivative of every basis function at x.
  void Evaluate(double x, Eigen::Ref<VectorXd> value, Eigen::Ref<VectorXd> second) const {
    const Index nk = static_cast<Index>(knots_.size());
    // Order-1 indicators on half-open spans; the right end belongs to the
    // last nondegenerate span.
    std::vector<double> b1(static_cast<size_t>(nk - 1), 0.0);
    Index span = -1;
    for (Index i = 0; i + 1 < nk; ++i) {
      if (knots_[i] < knots_[i + 1] && knots_[i] <= x && x < knots_[i + 1]) span = i;
    }
    if (span < 0) {
      for (Index i = nk - 2; i >= 0; --i) {
        if (knots_[i] < knots_[i + 1]) {
          span = i;
          break;
        }
      }
    }
    b1[static_cast<size_t>(span)] = 1.0;
    const auto b2 = Raise(b1, 2, x);
    const auto b3 = Raise(b2, 3, x);
    const auto b4 = Raise(b3, 4, x);

    // First derivatives of order-3 functions from order-2 values.
    std::vector<double> db3(b3.size(), 0.0);
    for (size_t i = 0; i < db3.size(); ++i) {
      db3[i] = 2.0 * (Ratio(b2[i], knots_[i + 2] - knots_[i]) -
                      Ratio(b2[i + 1], knots_[i + 3] - knots_[i + 1]));
    }
    for (Index i = 0; i < d_; ++i) {
      const auto u = static_cast<size_t>(i);
      value[i] = b4[u];
      second[i] = 3.0 * (Ratio(db3[u], knots_[u + 3] - knots_[u]) -
                         Ratio(db3[u + 1], knots_[u + 4] - knots_[u + 1]));
    }
  }

 private:
  static double Ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

  std::vector<double> Raise(const std::vector<double>& lower, int order, double x) const {
    std::vector<double> out(lower.size() - 1, 0.0);
    for (size_t i = 0; i < out.size(); ++i) {
      const double left = Ratio((x - knots_[i]) * lower[i], knots_[i + order - 1] - knots_[i]);
      const double right =
          Ratio((knots_[i + order] - x) * lower[i + 1], knots_[i + order] - knots_[i + 1]);
      out[i] = left + right;
    }
    return out;
  }

  Index d_;
  std::vector<double> knots_;
};

}  // namespace

Grid::Grid(VectorXd points) : points_(std::move(points)) {
  if (points_.size() < 4) throw InputError("grid needs at least 4 points");
  for (Index k = 0; k < points_.size(); ++k) {
    if (!std::isfinite(points_[k])) throw InputError("grid contains a non-finite point");
    if (k > 0 && !(points_[k] > points_[k - 1])) {
      throw InputError("grid points must be strictly increasing");
    }
  }
  weights_ = TrapezoidWeights(points_);
}

bool Grid::SameAs(const Grid& other) const {
  if (size() != other.size()) return false;
  const double tol = 1e-12 * std::max(length(), other.length());
  return ((points_ - other.points_).cwiseAbs().maxCoeff() <= tol);
}

Grid BuildGrid(double a, double b, Index m) {
  if (m < 4) throw InputError("grid needs m >= 4, got " + std::to_string(m));
  if (!(a < b)) throw InputError("grid needs a < b");
  VectorXd t(m);
  for (Index k = 0; k < m; ++k) {
    t[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(m - 1);
  }
  t[m - 1] = b;
  return Grid(std::move(t));
}

Grid ParseGridSpec(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw InputError("grid spec must be a:b:m");
  const double a = ParseDouble(text.substr(0, c1));
  const double b = ParseDouble(text.substr(c1 + 1, c2 - c1 - 1));
  const double m = ParseDouble(text.substr(c2 + 1));
  if (m != std::floor(m)) throw InputError("grid point count must be an integer");
  return BuildGrid(a, b, static_cast<Index>(m));
}

FunctionalSample::FunctionalSample(Grid grid, MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.rows() < 2) throw InputError("a functional sample needs at least 2 curves");
  if (values_.cols() != grid_.size()) {
    throw InputError("curve length " + std::to_string(values_.cols()) +
                     " does not match grid length " + std::to_string(grid_.size()));
  }
  if (!values_.allFinite()) throw InputError("functional sample contains non-finite values");
}

std::string_view ToString(BasisKind kind) {
  return kind == BasisKind::kFourier ? "fourier" : "bspline";
}

BasisKind ParseBasisKind(std::string_view text) {
  if (text == "fourier") return BasisKind::kFourier;
  if (text == "bspline") return BasisKind::kBSpline;
  throw InputError("unknown basis kind '" + std::string(text) + "'");
}

BasisSystem::BasisSystem(BasisKind kind, Grid grid, MatrixXd eval, MatrixXd eval_dd)
    : kind_(kind), grid_(std::move(grid)), eval_(std::move(eval)), eval_dd_(std::move(eval_dd)) {
  const auto& w = grid_.weights();
  gram_ = eval_ * w.asDiagonal() * eval_.transpose();
  penalty_ = eval_dd_ * w.asDiagonal() * eval_dd_.transpose();
  gram_ = 0.5 * (gram_ + gram_.transpose()).eval();
  penalty_ = 0.5 * (penalty_ + penalty_.transpose()).eval();
}

BasisSystem BuildBasis(BasisKind kind, Index d, const Grid& grid) {
  const Index m = grid.size();
  if (d > m) {
    throw InputError("basis dimension " + std::to_string(d) + " exceeds grid length " +
                     std::to_string(m));
  }
  MatrixXd eval(d, m);
  MatrixXd eval_dd(d, m);
  const auto& t = grid.points();
  if (kind == BasisKind::kFourier) {
    if (d < 3 || d % 2 == 0) {
      throw InputError("fourier basis needs an odd dimension >= 3, got " + std::to_string(d));
    }
    const double len = grid.length();
    const double c0 = 1.0 / std::sqrt(len);
    const double c1 = std::sqrt(2.0 / len);
    for (Index k = 0; k < m; ++k) {
      const double s = t[k] - grid.lower();
      eval(0, k) = c0;
      eval_dd(0, k) = 0.0;
      for (Index f = 1; 2 * f - 1 < d; ++f) {
        const double omega = 2.0 * std::numbers::pi * static_cast<double>(f) / len;
        const double sn = c1 * std::sin(omega * s);
        const double cs = c1 * std::cos(omega * s);
        eval(2 * f - 1, k) = sn;
        eval(2 * f, k) = cs;
        eval_dd(2 * f - 1, k) = -omega * omega * sn;
        eval_dd(2 * f, k) = -omega * omega * cs;
      }
    }
  } else {
    if (d < 4) throw InputError("cubic B-spline basis needs d >= 4, got " + std::to_string(d));
    const CubicBSpline spline(grid.lower(), grid.upper(), d);
    for (Index k = 0; k < m; ++k) spline.Evaluate(t[k], eval.col(k), eval_dd.col(k));
  }
  return BasisSystem(kind, grid, std::move(eval), std::move(eval_dd));
}

MatrixXd ProjectSample(const FunctionalSample& sample, const BasisSystem& basis) {
  if (!sample.grid().SameAs(basis.grid())) {
    throw InputError("sample grid does not match the basis grid");
  }
  return sample.values() * sample.grid().weights().asDiagonal() * basis.eval().transpose();
}

double Roughness(const BasisSystem& basis, const VectorXd& coef) {
  return std::max(0.0, coef.dot(basis.penalty() * coef));
}

double PenalizedNormSq(const BasisSystem& basis, const Direction& u, double scale_sq, double tau) {
  if (tau < 0.0) throw InputError("smoothing parameter must be nonnegative");
  if (tau == 0.0) return scale_sq;
  return scale_sq + tau * Roughness(basis, u.coef);
}

PenaltyNullspace ComputePenaltyNullspace(const BasisSystem& basis, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(basis.penalty());
  const VectorXd& ev = eig.eigenvalues();
  const double cutoff = rel_tol * ev.maxCoeff();
  Index null_dim = 0;
  while (null_dim < ev.size() && ev[null_dim] < cutoff) ++null_dim;

  PenaltyNullspace out;
  out.basis = eig.eigenvectors().leftCols(null_dim);
  if (null_dim == ev.size()) {
    out.coercivity = std::numeric_limits<double>::infinity();
    return out;
  }
  // Generalized eigenvectors are J-orthogonal, so the smallest eigenvalue
  // past the null block is the minimum of the quotient on the complement.
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> gen(basis.penalty(), basis.gram());
  out.coercivity = gen.eigenvalues()[null_dim];
  return out;
}

VectorXd EvaluateCurve(const BasisSystem& basis, const VectorXd& coef) {
  if (coef.size() != basis.dim()) throw InputError("coefficient length does not match basis");
  return basis.eval().transpose() * coef;
}

MatrixXd CrossGram(const BasisSystem& a, const BasisSystem& b) {
  if (!a.grid().SameAs(b.grid())) throw InputError("bases live on different grids");
  return a.eval() * a.grid().weights().asDiagonal() * b.eval().transpose();
}

VectorXd ProjectCoefficients(const BasisSystem& to, const BasisSystem& from, const VectorXd& coef) {
  return to.gram().ldlt().solve(CrossGram(to, from) * coef);
}

}  // namespace rscca
