#include <algorithm>
#include <numeric>
#include <random>

#include "rscca/error.h"
#include "rscca/scca.h"

namespace rscca {
namespace {

MatrixXd Rows(const MatrixXd& m, const std::vector<Index>& idx) {
  MatrixXd out(static_cast<Index>(idx.size()), m.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = m.row(idx[i]);
  return out;
}

}  // namespace

TauSelection SelectTau(const ObjectiveContext& ctx, std::vector<double> tau_grid, int folds,
                       const RobustOptions& options, FitMethod method) {
  ctx.Validate();
  if (tau_grid.empty()) throw InputError("tau grid is empty");
  if (folds < 2) throw InputError("tau selection needs at least 2 folds");
  if (folds > ctx.n()) throw InputError("more folds than observations");
  for (double t : tau_grid) {
    if (!(t >= 0.0)) throw InputError("tau grid values must be nonnegative");
  }
  std::sort(tau_grid.begin(), tau_grid.end());
  tau_grid.erase(std::unique(tau_grid.begin(), tau_grid.end()), tau_grid.end());

  std::vector<Index> perm(static_cast<size_t>(ctx.n()));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(options.seed ^ 0x5eedf01d5ULL);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<std::vector<Index>> train(static_cast<size_t>(folds));
  std::vector<std::vector<Index>> test(static_cast<size_t>(folds));
  for (size_t i = 0; i < perm.size(); ++i) {
    const auto fold = i % static_cast<size_t>(folds);
    for (size_t f = 0; f < static_cast<size_t>(folds); ++f) {
      (f == fold ? test[f] : train[f]).push_back(perm[i]);
    }
  }

  TauSelection out;
  for (double tau : tau_grid) {
    TauCell cell;
    cell.tau = tau;
    for (size_t f = 0; f < static_cast<size_t>(folds); ++f) {
      ObjectiveContext fold_ctx = ctx;
      fold_ctx.scores_x = Rows(ctx.scores_x, train[f]);
      fold_ctx.scores_y = Rows(ctx.scores_y, train[f]);
      fold_ctx.smoothing.tau_x = tau;
      fold_ctx.smoothing.tau_y = tau;
      try {
        const SccaFit fit = Fit(fold_ctx, options, method);
        ObjectiveContext held = ctx;
        held.scores_x = Rows(ctx.scores_x, test[f]);
        held.scores_y = Rows(ctx.scores_y, test[f]);
        held.smoothing.tau_x = 0.0;
        held.smoothing.tau_y = 0.0;
        cell.heldout.push_back(Objective(fit.phi.coef, fit.psi.coef, held));
      } catch (const std::exception&) {
        ++cell.failed_folds;
      }
    }
    cell.usable = cell.failed_folds == 0;
    if (cell.usable) {
      cell.mean_heldout = std::accumulate(cell.heldout.begin(), cell.heldout.end(), 0.0) /
                          static_cast<double>(cell.heldout.size());
    }
    out.table.push_back(std::move(cell));
  }

  int best = -1;
  for (size_t i = 0; i < out.table.size(); ++i) {
    if (!out.table[i].usable) continue;
    if (best < 0 || out.table[i].mean_heldout >= out.table[static_cast<size_t>(best)].mean_heldout) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw NumericalError("every tau grid cell failed");
  out.tau = out.table[static_cast<size_t>(best)].tau;
  return out;
}

}  // namespace rscca
