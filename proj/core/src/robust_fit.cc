#include <cmath>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fit_internal.h"
#include "rscca/error.h"
#include "rscca/nelder_mead.h"
#include "rscca/scca.h"

namespace rscca {
namespace {

// One block in coordinates where the search sphere is the Euclidean unit
// sphere. Directions that leave every centred projection unchanged only move
// the roughness, so they are profiled out in closed form first:
// a = M c with M = (I - N (N'RN)^+ N'R) V, where V spans the row space of the
// centred scores and N its complement. Then w = L'c with M'JM = LL'.
class Block {
 public:
  Block(const MatrixXd& scores, const MatrixXd& gram, const MatrixXd& penalty, double tau)
      : tau_(tau) {
    const Index d = scores.cols();
    const MatrixXd centered = scores.rowwise() - scores.colwise().mean();
    const Eigen::JacobiSVD<MatrixXd> svd(centered, Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    Index rank = 0;
    while (rank < sv.size() && sv[rank] > 1e-9 * sv[0]) ++rank;
    if (rank == 0) throw NumericalError("no nondegenerate projection");
    if (rank == d) {
      map_ = MatrixXd::Identity(d, d);
    } else {
      const MatrixXd v = svd.matrixV().leftCols(rank);
      const MatrixXd nul = svd.matrixV().rightCols(d - rank);
      const MatrixXd nrn = nul.transpose() * penalty * nul;
      const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(nrn);
      map_ = v - nul * cod.solve(nul.transpose() * penalty * v);
    }
    const MatrixXd g = map_.transpose() * gram * map_;
    chol_.compute(0.5 * (g + g.transpose()));
    if (chol_.info() != Eigen::Success) throw NumericalError("Gram matrix is not positive definite");
    const MatrixXd& lower = chol_.matrixL();
    const MatrixXd sm = scores * map_;
    scores_ = lower.triangularView<Eigen::Lower>().solve(sm.transpose()).transpose();
    const MatrixXd pm = map_.transpose() * penalty * map_;
    const MatrixXd half = lower.triangularView<Eigen::Lower>().solve(pm);
    penalty_ = lower.triangularView<Eigen::Lower>().solve(half.transpose());
    penalty_ = 0.5 * (penalty_ + penalty_.transpose()).eval();
    project_ = chol_.solve(map_.transpose() * gram);
  }

  const MatrixXd& scores() const { return scores_; }
  const MatrixXd& penalty() const { return penalty_; }
  double tau() const { return tau_; }
  Index dim() const { return scores_.cols(); }
  double Rough(const VectorXd& w) const { return std::max(0.0, w.dot(penalty_ * w)); }
  VectorXd ToCoef(const VectorXd& w) const { return map_ * chol_.matrixU().solve(w); }
  // J-projection of a coefficient vector onto the search space.
  VectorXd FromCoef(const VectorXd& coef) const { return chol_.matrixU() * (project_ * coef); }

 private:
  double tau_;
  MatrixXd map_;
  Eigen::LLT<MatrixXd> chol_;
  MatrixXd scores_;
  MatrixXd penalty_;
  MatrixXd project_;
};

class WhitenedProblem {
 public:
  explicit WhitenedProblem(const ObjectiveContext& ctx)
      : ctx_(ctx),
        x_(ctx.scores_x, ctx.gram, ctx.penalty, ctx.smoothing.tau_x),
        y_(ctx.scores_y, ctx.gram, ctx.penalty, ctx.smoothing.tau_y) {}

  const Block& block(int b) const { return b == 0 ? x_ : y_; }
  const MatrixXd& scores(int b) const { return block(b).scores(); }
  double tau(int b) const { return block(b).tau(); }
  const AssociationSpec& spec() const { return ctx_.spec; }

  double Value(const VectorXd& wa, const VectorXd& wb, bool* degenerate = nullptr) const {
    const Coassociation c = Coassociate(x_.scores() * wa, y_.scores() * wb, ctx_.spec);
    if (degenerate != nullptr) *degenerate = c.status == MarginStatus::kDegenerate;
    return PenalizedRatio(c, x_.tau(), x_.Rough(wa), y_.tau(), y_.Rough(wb));
  }

 private:
  const ObjectiveContext& ctx_;
  Block x_;
  Block y_;
};

struct HalfStepResult {
  VectorXd w;
  double value = 0.0;
  long evaluations = 0;
};

// Maximizes over the unit sphere of one block with the other block's
// projection fixed. Nelder-Mead runs in the tangent chart
// w(z) = (w0 + Q z) / |w0 + Q z| and is re-centred after each run.
HalfStepResult HalfStep(const WhitenedProblem& prob, int block, const VectorXd& w_start,
                        const VectorXd& w_other, const RobustOptions& options) {
  const MatrixXd& s = prob.scores(block);
  const VectorXd other_proj = prob.scores(1 - block) * w_other;
  const double other_rough = prob.block(1 - block).Rough(w_other);
  const Index d = w_start.size();

  auto value_at = [&](const VectorXd& w) {
    const VectorXd proj = s * w;
    const Coassociation c = block == 0 ? Coassociate(proj, other_proj, prob.spec())
                                       : Coassociate(other_proj, proj, prob.spec());
    const double rough = prob.block(block).Rough(w);
    return block == 0 ? PenalizedRatio(c, prob.tau(0), rough, prob.tau(1), other_rough)
                      : PenalizedRatio(c, prob.tau(0), other_rough, prob.tau(1), rough);
  };

  HalfStepResult out;
  out.w = w_start.normalized();
  out.value = value_at(out.w);
  ++out.evaluations;
  if (d == 1) return out;

  double step = options.initial_step;
  for (int round = 0; round < 4 && out.evaluations < options.max_evals_per_half; ++round) {
    const Eigen::HouseholderQR<MatrixXd> qr(out.w);
    const MatrixXd q = MatrixXd(qr.householderQ()).rightCols(d - 1);
    const VectorXd center = out.w;
    auto chart = [&](const VectorXd& z) { return VectorXd((center + q * z).normalized()); };

    NelderMeadOptions nm;
    nm.step = step;
    nm.max_evals = options.max_evals_per_half - out.evaluations;
    nm.ftol = 1e-14;
    nm.xtol = options.step_tol;
    const NelderMeadResult res = NelderMeadMinimize(
        [&](const VectorXd& z) { return -value_at(chart(z)); }, VectorXd::Zero(d - 1), nm);
    out.evaluations += res.evaluations;
    const double gain = -res.value - out.value;
    if (gain > 0.0) {
      out.w = chart(res.x);
      out.value = -res.value;
    }
    if (gain <= 0.1 * options.gain_tol) break;
    step = std::max(0.25 * step, 1e-3);
  }
  return out;
}

struct Start {
  std::string origin;
  VectorXd wa;
  VectorXd wb;
};

VectorXd LeadingPrincipal(const Block& block) {
  const MatrixXd& s = block.scores();
  const MatrixXd centered = s.rowwise() - s.colwise().mean();
  const MatrixXd cov = centered.transpose() * centered / static_cast<double>(s.rows() - 1);
  const MatrixXd metric =
      MatrixXd::Identity(s.cols(), s.cols()) + block.tau() * block.penalty();
  const Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> gen(cov, metric);
  return gen.eigenvectors().col(s.cols() - 1).normalized();
}

std::vector<Start> MakeStarts(const ObjectiveContext& ctx, const WhitenedProblem& prob,
                              const RobustOptions& options) {
  std::vector<Start> starts;
  if (options.classical_start) {
    ObjectiveContext classical_ctx = ctx;
    classical_ctx.spec.kind = AssociationKind::kCovPearson;
    try {
      const SccaFit classical = FitClassical(classical_ctx);
      starts.push_back({"classical", prob.block(0).FromCoef(classical.phi.coef).normalized(),
                        prob.block(1).FromCoef(classical.psi.coef).normalized()});
    } catch (const NumericalError&) {
      // Singular classical blocks: the remaining starts still apply.
    }
  }
  if (options.principal_start) {
    starts.push_back({"principal", LeadingPrincipal(prob.block(0)), LeadingPrincipal(prob.block(1))});
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < options.random_starts; ++r) {
    VectorXd wa(prob.block(0).dim());
    VectorXd wb(prob.block(1).dim());
    for (Index j = 0; j < wa.size(); ++j) wa[j] = normal(rng);
    for (Index j = 0; j < wb.size(); ++j) wb[j] = normal(rng);
    starts.push_back({"random" + std::to_string(r), wa.normalized(), wb.normalized()});
  }
  return starts;
}

// Orders the blocks by scale-free quantities that do not depend on which
// block is called X, so that a swapped problem runs the identical search.
bool BlocksOutOfOrder(const ObjectiveContext& ctx) {
  const auto key = [](const MatrixXd& s, double tau) {
    const MatrixXd c = s.rowwise() - s.colwise().mean();
    const double norm = std::max(c.norm(), 1e-300);
    return std::make_tuple(tau, c.cwiseAbs().sum() / norm, s.sum() / norm, c.array().cube().sum() / (norm * norm * norm));
  };
  return key(ctx.scores_y, ctx.smoothing.tau_y) < key(ctx.scores_x, ctx.smoothing.tau_x);
}

SccaFit FitOrdered(const ObjectiveContext& ctx, const RobustOptions& options) {

  const WhitenedProblem prob(ctx);
  const std::vector<Start> starts = MakeStarts(ctx, prob, options);
  if (starts.empty()) throw InputError("robust fit has no starting directions");

  SccaFit fit;
  fit.method = "robust";
  fit.seed = options.seed;
  VectorXd best_wa;
  VectorXd best_wb;
  double best_value = -1.0;

  for (const Start& start : starts) {
    RestartRecord rec;
    rec.origin = start.origin;
    VectorXd wa = start.wa;
    VectorXd wb = start.wb;
    double value = prob.Value(wa, wb);
    rec.start_objective = value;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      const VectorXd prev_a = wa;
      const VectorXd prev_b = wb;
      const HalfStepResult ha = HalfStep(prob, 0, wa, wb, options);
      wa = ha.w;
      const HalfStepResult hb = HalfStep(prob, 1, wb, wa, options);
      wb = hb.w;
      rec.evaluations += ha.evaluations + hb.evaluations;
      double swept = hb.value;
      // Alternation zig-zags slowly along ridges; extrapolate the sweep.
      for (double omega = 1.0; omega <= 64.0; omega *= 2.0) {
        const VectorXd ea = (wa + omega * (wa - prev_a)).normalized();
        const VectorXd eb = (wb + omega * (wb - prev_b)).normalized();
        const double v = prob.Value(ea, eb);
        ++rec.evaluations;
        if (!(v > swept)) break;
        wa = ea;
        wb = eb;
        swept = v;
      }
      const double gain = swept - value;
      value = std::max(value, swept);
      rec.sweep_objective.push_back(value);
      if (gain < options.gain_tol) break;
    }
    bool degenerate = false;
    rec.final_objective = prob.Value(wa, wb, &degenerate);
    rec.degenerate = degenerate;
    rec.alpha = NormalizeL2(prob.block(0).ToCoef(wa), ctx.gram).coef;
    rec.beta = NormalizeL2(prob.block(1).ToCoef(wb), ctx.gram).coef;
    if (!degenerate && rec.final_objective > best_value) {
      best_value = rec.final_objective;
      best_wa = wa;
      best_wb = wb;
      fit.trace.best_restart = static_cast<int>(fit.trace.restarts.size());
    }
    fit.trace.restarts.push_back(std::move(rec));
  }
  if (fit.trace.best_restart < 0) throw NumericalError("no nondegenerate projection");

  internal::FinalizeFit(ctx, prob.block(0).ToCoef(best_wa), prob.block(1).ToCoef(best_wb), fit);
  return fit;
}

}  // namespace

SccaFit FitRobust(const ObjectiveContext& ctx, const RobustOptions& options) {
  ctx.Validate();
  if (ctx.n() < 10) throw InputError("robust fit needs at least 10 observations");
  if (ctx.dim() > ctx.n()) throw InputError("basis dimension exceeds the number of curves");
  if (!BlocksOutOfOrder(ctx)) return FitOrdered(ctx, options);

  ObjectiveContext swapped = ctx;
  std::swap(swapped.scores_x, swapped.scores_y);
  std::swap(swapped.smoothing.tau_x, swapped.smoothing.tau_y);
  SccaFit fit = FitOrdered(swapped, options);
  std::swap(fit.phi, fit.psi);
  std::swap(fit.phi_penalized_unit, fit.psi_penalized_unit);
  std::swap(fit.smoothing.tau_x, fit.smoothing.tau_y);
  for (RestartRecord& rec : fit.trace.restarts) std::swap(rec.alpha, rec.beta);
  return fit;
}

}  // namespace rscca
