#include <cmath>
#include <string>

#include "rscca/error.h"
#include "rscca/scca.h"

namespace rscca {

void ObjectiveContext::Validate() const {
  if (scores_x.rows() != scores_y.rows()) {
    throw InputError("X has " + std::to_string(scores_x.rows()) + " rows but Y has " +
                     std::to_string(scores_y.rows()));
  }
  if (scores_x.rows() < 2) throw InputError("need at least two paired observations");
  const Index d = scores_x.cols();
  if (scores_y.cols() != d || gram.rows() != d || gram.cols() != d || penalty.rows() != d ||
      penalty.cols() != d) {
    throw InputError("score, gram and penalty dimensions disagree");
  }
  if (smoothing.tau_x < 0.0 || smoothing.tau_y < 0.0) {
    throw InputError("smoothing parameters must be nonnegative");
  }
  rscca::Validate(spec);
}

ObjectiveContext MakeContext(const MatrixXd& scores_x, const MatrixXd& scores_y,
                             const BasisSystem& basis, const AssociationSpec& spec, double tau_x,
                             double tau_y) {
  ObjectiveContext ctx{scores_x, scores_y, basis.gram(), basis.penalty(), spec,
                       SmoothingParams{tau_x, tau_y, basis.dim()}};
  ctx.Validate();
  return ctx;
}

double PenalizedRatio(const Coassociation& c, double tau_x, double rough_x, double tau_y,
                      double rough_y) {
  if (c.status == MarginStatus::kDegenerate) return 0.0;
  const double den = (c.sigma_u * c.sigma_u + tau_x * rough_x) *
                     (c.sigma_v * c.sigma_v + tau_y * rough_y);
  if (!(den > 0.0)) return 0.0;
  return c.gamma * c.gamma / den;
}

double Objective(const VectorXd& alpha, const VectorXd& beta, const ObjectiveContext& ctx) {
  const VectorXd p = ctx.scores_x * alpha;
  const VectorXd q = ctx.scores_y * beta;
  const Coassociation c = Coassociate(p, q, ctx.spec);
  const double rough_x = std::max(0.0, alpha.dot(ctx.penalty * alpha));
  const double rough_y = std::max(0.0, beta.dot(ctx.penalty * beta));
  return PenalizedRatio(c, ctx.smoothing.tau_x, rough_x, ctx.smoothing.tau_y, rough_y);
}

Direction NormalizeL2(const VectorXd& coef, const MatrixXd& gram) {
  const double norm_sq = coef.dot(gram * coef);
  if (!(norm_sq > 0.0)) throw InputError("cannot normalize a zero direction");
  Direction out;
  out.coef = coef / std::sqrt(norm_sq);
  Index largest = 0;
  out.coef.cwiseAbs().maxCoeff(&largest);
  if (out.coef[largest] < 0.0) out.coef = -out.coef;
  out.convention = NormConvention::kL2Unit;
  return out;
}

SccaFit Fit(const ObjectiveContext& ctx, const RobustOptions& options, FitMethod method) {
  if (method == FitMethod::kClassical ||
      (method == FitMethod::kAuto && ctx.spec.kind == AssociationKind::kCovPearson)) {
    SccaFit fit = FitClassical(ctx);
    fit.seed = options.seed;
    return fit;
  }
  return FitRobust(ctx, options);
}

}  // namespace rscca
