#include <cmath>
#include <string>

#include "fit_internal.h"
#include "rscca/error.h"
#include "rscca/scca.h"

namespace rscca {
namespace internal {

CovarianceBlocks SampleCovariances(const MatrixXd& x, const MatrixXd& y) {
  const double n1 = static_cast<double>(x.rows() - 1);
  const MatrixXd xc = x.rowwise() - x.colwise().mean();
  const MatrixXd yc = y.rowwise() - y.colwise().mean();
  return {xc.transpose() * xc / n1, yc.transpose() * yc / n1, xc.transpose() * yc / n1};
}

void FinalizeFit(const ObjectiveContext& ctx, const VectorXd& alpha, const VectorXd& beta,
                 SccaFit& fit) {
  fit.phi = NormalizeL2(alpha, ctx.gram);
  fit.psi = NormalizeL2(beta, ctx.gram);
  fit.spec = ctx.spec;
  fit.smoothing = ctx.smoothing;
  fit.smoothing.d = ctx.dim();

  const VectorXd p = ctx.scores_x * fit.phi.coef;
  const VectorXd q = ctx.scores_y * fit.psi.coef;
  const Coassociation c = Coassociate(p, q, ctx.spec);
  const double rough_x = std::max(0.0, fit.phi.coef.dot(ctx.penalty * fit.phi.coef));
  const double rough_y = std::max(0.0, fit.psi.coef.dot(ctx.penalty * fit.psi.coef));
  fit.lambda_hat =
      PenalizedRatio(c, ctx.smoothing.tau_x, rough_x, ctx.smoothing.tau_y, rough_y);
  fit.assoc_unpenalized = PenalizedRatio(c, 0.0, 0.0, 0.0, 0.0);

  auto penalized = [](const Direction& u, double scale, double tau, double rough) {
    Direction out = u;
    out.convention = NormConvention::kPenalizedUnit;
    const double norm_sq = scale * scale + tau * rough;
    if (norm_sq > 0.0) out.coef /= std::sqrt(norm_sq);
    return out;
  };
  fit.phi_penalized_unit = penalized(fit.phi, c.sigma_u, ctx.smoothing.tau_x, rough_x);
  fit.psi_penalized_unit = penalized(fit.psi, c.sigma_v, ctx.smoothing.tau_y, rough_y);
}

}  // namespace internal

namespace {

// Lower Cholesky factor of a penalized block, rejecting numerically singular
// blocks.
Eigen::LLT<MatrixXd> FactorBlock(const MatrixXd& block, const char* name) {
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(block, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  const double bottom = eig.eigenvalues().minCoeff();
  if (!(top > 0.0) || !(bottom > 1e-13 * top)) {
    throw NumericalError(std::string("penalized ") + name +
                         " block is singular; increase tau or reduce the basis dimension");
  }
  Eigen::LLT<MatrixXd> llt(block);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string("Cholesky factorization of the ") + name + " block failed");
  }
  return llt;
}

}  // namespace

SccaFit FitClassical(const ObjectiveContext& ctx) {
  ctx.Validate();
  if (ctx.spec.kind != AssociationKind::kCovPearson) {
    throw InputError("the spectral solver only applies to the cov_pearson association");
  }
  const auto cov = internal::SampleCovariances(ctx.scores_x, ctx.scores_y);
  const auto lx = FactorBlock(cov.xx + ctx.smoothing.tau_x * ctx.penalty, "X");
  const auto ly = FactorBlock(cov.yy + ctx.smoothing.tau_y * ctx.penalty, "Y");

  // M = Lx^{-1} C_xy Ly^{-T}; its leading singular pair gives the maximizer.
  const MatrixXd left = lx.matrixL().solve(cov.xy);
  const MatrixXd whitened = ly.matrixL().solve(left.transpose()).transpose();
  const Eigen::JacobiSVD<MatrixXd> svd(whitened, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd alpha = lx.matrixU().solve(svd.matrixU().col(0));
  const VectorXd beta = ly.matrixU().solve(svd.matrixV().col(0));

  SccaFit fit;
  fit.method = "classical";
  internal::FinalizeFit(ctx, alpha, beta, fit);
  return fit;
}

}  // namespace rscca
