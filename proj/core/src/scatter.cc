#include <algorithm>
#include <cmath>

#include "rscca/error.h"
#include "rscca/robust_measures.h"

namespace rscca {
namespace {

// Initial marginal spread: normalized MAD, falling back to the SD when more
// than half of the values coincide.
double InitialSpread(const VecRef& x) {
  ScaleSpec mad;
  const double s = Scale(x, mad);
  if (s > 0.0) return s;
  ScaleSpec sd;
  sd.kind = ScaleKind::kSd;
  return Scale(x, sd);
}

BivariateScatter DegenerateScatter(double su, double sv, Eigen::Vector2d location) {
  BivariateScatter out;
  out.w(0, 0) = su * su;
  out.w(1, 1) = sv * sv;
  out.location = location;
  out.converged = true;
  return out;
}

}  // namespace

BivariateScatter ScatterM(const VecRef& u, const VecRef& v, const MScatterTuning& tuning) {
  if (u.size() != v.size()) throw InputError("paired samples differ in length");
  const Index n = u.size();
  if (n < 5) throw InputError("M-scatter needs at least 5 observations");

  Eigen::Vector2d loc(Median(u), Median(v));
  const double su = InitialSpread(u);
  const double sv = InitialSpread(v);
  if (!(su > 0.0) || !(sv > 0.0)) return DegenerateScatter(su, sv, loc);

  // Huber weights at the chi-square(2) quantile k2 = -2 log(1 - p); the
  // factor beta = E[min(chi2_2, k2)] / 2 = 1 - exp(-k2 / 2) makes the
  // scatter consistent at the bivariate normal.
  const double k2 = -2.0 * std::log1p(-tuning.quantile);
  const double k = std::sqrt(k2);
  const double beta = -std::expm1(-0.5 * k2);

  BivariateScatter out;
  Eigen::Matrix2d w = Eigen::Matrix2d::Zero();
  w(0, 0) = su * su;
  w(1, 1) = sv * sv;
  const double* pu = u.data();
  const double* pv = v.data();

  for (int iter = 1; iter <= tuning.max_iter; ++iter) {
    double det = w(0, 0) * w(1, 1) - w(0, 1) * w(0, 1);
    if (!(det > 1e-12 * w(0, 0) * w(1, 1))) {
      w.diagonal().array() += 1e-12 * w.trace();
      det = w(0, 0) * w(1, 1) - w(0, 1) * w(0, 1);
      out.regularized = true;
    }
    const double i00 = w(1, 1) / det;
    const double i01 = -w(0, 1) / det;
    const double i11 = w(0, 0) / det;

    double sw1 = 0.0;
    double l0 = 0.0;
    double l1 = 0.0;
    double s00 = 0.0;
    double s01 = 0.0;
    double s11 = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double r0 = pu[i] - loc[0];
      const double r1 = pv[i] - loc[1];
      const double d2 = i00 * r0 * r0 + 2.0 * i01 * r0 * r1 + i11 * r1 * r1;
      const double w1 = d2 <= k2 ? 1.0 : k / std::sqrt(d2);
      const double w2 = (d2 <= k2 ? 1.0 : k2 / d2) / beta;
      sw1 += w1;
      l0 += w1 * pu[i];
      l1 += w1 * pv[i];
      s00 += w2 * r0 * r0;
      s01 += w2 * r0 * r1;
      s11 += w2 * r1 * r1;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    const Eigen::Vector2d new_loc(l0 / sw1, l1 / sw1);
    Eigen::Matrix2d new_w;
    new_w << s00 * inv_n, s01 * inv_n, s01 * inv_n, s11 * inv_n;

    // Relative change measured in the current marginal scales, so the stopping
    // rule is invariant under coordinatewise affine maps.
    const double r0 = std::sqrt(w(0, 0));
    const double r1 = std::sqrt(w(1, 1));
    const double change = std::max({std::abs(new_w(0, 0) - w(0, 0)) / (r0 * r0),
                                    std::abs(new_w(1, 1) - w(1, 1)) / (r1 * r1),
                                    std::abs(new_w(0, 1) - w(0, 1)) / (r0 * r1),
                                    std::abs(new_loc[0] - loc[0]) / r0,
                                    std::abs(new_loc[1] - loc[1]) / r1});
    w = new_w;
    loc = new_loc;
    out.iterations = iter;
    if (change < tuning.tol) {
      out.converged = true;
      break;
    }
  }
  out.w = w;
  out.location = loc;
  return out;
}

BivariateScatter ScatterOgk(const VecRef& u, const VecRef& v, const ScaleSpec& scale) {
  if (u.size() != v.size()) throw InputError("paired samples differ in length");
  if (u.size() < 5) throw InputError("OGK scatter needs at least 5 observations");
  const double su = Scale(u, scale);
  const double sv = Scale(v, scale);
  if (!(su > 0.0) || !(sv > 0.0)) {
    return DegenerateScatter(su, sv, Eigen::Vector2d(Median(u), Median(v)));
  }
  const Index n = u.size();
  Eigen::MatrixX2d y(n, 2);
  y.col(0) = u / su;
  y.col(1) = v / sv;

  const double sp = Scale(y.col(0) + y.col(1), scale);
  const double sm = Scale(y.col(0) - y.col(1), scale);
  Eigen::Matrix2d gk;
  gk << 1.0, 0.25 * (sp * sp - sm * sm), 0.25 * (sp * sp - sm * sm), 1.0;

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(gk);
  const Eigen::Matrix2d e = eig.eigenvectors();
  const Eigen::MatrixX2d z = y * e;
  Eigen::Vector2d z_scale;
  Eigen::Vector2d z_center;
  for (int j = 0; j < 2; ++j) {
    z_scale[j] = Scale(z.col(j), scale);
    z_center[j] = Median(z.col(j));
  }
  const Eigen::Matrix2d a = Eigen::Vector2d(su, sv).asDiagonal() * e;

  BivariateScatter out;
  out.w = a * z_scale.array().square().matrix().asDiagonal() * a.transpose();
  out.w(1, 0) = out.w(0, 1);
  out.location = a * z_center;
  out.converged = true;
  out.iterations = 1;
  return out;
}

AssocValue AssocFromScatter(const BivariateScatter& scatter) {
  const double w11 = scatter.w(0, 0);
  const double w22 = scatter.w(1, 1);
  if (!(w11 > 0.0) || !(w22 > 0.0)) return {MarginStatus::kDegenerate, 0.0};
  return {MarginStatus::kOk, scatter.w(0, 1) / std::sqrt(w11 * w22)};
}

}  // namespace rscca
