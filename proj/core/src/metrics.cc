#include "rscca/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "rscca/error.h"

namespace rscca {

MetricValue LxMetric(const VectorXd& u1, const VectorXd& u2, const MatrixXd& scores,
                     const AssociationSpec& spec) {
  const VectorXd p1 = scores * u1;
  const VectorXd p2 = scores * u2;
  const Coassociation c = Coassociate(p1, p2, spec);
  if (c.status == MarginStatus::kDegenerate) return {0.0, true};
  const double den = c.sigma_u * c.sigma_u * c.sigma_v * c.sigma_v;
  return {c.gamma * c.gamma / den, false};
}

double PopulationSquaredCorrelation(const VectorXd& u, const VectorXd& v, const MatrixXd& g) {
  const double uu = u.dot(g * u);
  const double vv = v.dot(g * v);
  if (!(uu > 0.0) || !(vv > 0.0)) return 0.0;
  const double uv = u.dot(g * v);
  return uv * uv / (uu * vv);
}

double AngleDegrees(const VectorXd& u, const VectorXd& v, const MatrixXd& gram) {
  const double uu = u.dot(gram * u);
  const double vv = v.dot(gram * v);
  if (!(uu > 0.0) || !(vv > 0.0)) throw InputError("angle of a zero direction");
  const double c = std::min(1.0, std::abs(u.dot(gram * v)) / std::sqrt(uu * vv));
  return std::acos(c) * 180.0 / std::numbers::pi;
}

PopulationMoments ComputePopulationMoments(const ProcessModel& model, const BasisSystem& fit) {
  const Index k = model.num_scores();
  const MatrixXd a = model.Loadings(fit);
  const MatrixXd& cov = model.score_cov();
  return {a * cov.topLeftCorner(k, k) * a.transpose(),
          a * cov.bottomRightCorner(k, k) * a.transpose(),
          a * cov.topRightCorner(k, k) * a.transpose()};
}

double EllipticalScaleFactor(const AssociationSpec& spec, const TailSpec& tail, std::uint64_t seed) {
  const bool uses_scale = spec.kind == AssociationKind::kGkStar ||
                          spec.kind == AssociationKind::kGkBounded ||
                          spec.kind == AssociationKind::kOgk;
  const bool sd_scale = spec.kind == AssociationKind::kCovPearson ||
                        (uses_scale && spec.scale.kind == ScaleKind::kSd);
  const bool calibrated =
      sd_scale || spec.kind == AssociationKind::kMScatter ||
      (spec.scale.kind == ScaleKind::kMad && spec.scale.mad_c == kMadNormalConsistency) ||
      (spec.scale.kind == ScaleKind::kMScale && spec.scale.mscale_tuning == kBisquareTuning &&
       spec.scale.mscale_b == kBisquareTarget);
  if (tail.kind == TailKind::kGaussian && calibrated) return 1.0;
  if (tail.kind == TailKind::kStudentT && sd_scale) {
    if (!(tail.df > 2.0)) return std::numeric_limits<double>::infinity();
    return tail.df / (tail.df - 2.0);
  }
  constexpr Index kDraws = 200000;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(tail.df);
  VectorXd u(kDraws);
  VectorXd v(kDraws);
  for (Index i = 0; i < kDraws; ++i) {
    const double s = tail.kind == TailKind::kStudentT ? std::sqrt(chi2(rng) / tail.df) : 1.0;
    u[i] = normal(rng) / s;
    v[i] = normal(rng) / s;
  }
  const Coassociation c = Coassociate(u, v, spec);
  return 0.5 * (c.sigma_u * c.sigma_u + c.sigma_v * c.sigma_v);
}

DiscrepancyEstimate DiscrepancySuprema(const MatrixXd& scores_x, const MatrixXd& scores_y,
                                       const AssociationSpec& spec, double tau,
                                       const BasisSystem& basis, const PopulationMoments& pop,
                                       double scale_factor, int n_dirs, std::uint64_t seed,
                                       const std::vector<VectorXd>& extra_x,
                                       const std::vector<VectorXd>& extra_y) {
  if (tau < 0.0) throw InputError("smoothing parameter must be nonnegative");
  const Index d = basis.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Rescales so that c u'Gu + tau Psi(u) = 1.
  auto unit = [&](VectorXd u, const MatrixXd& g) {
    const double norm_sq = scale_factor * u.dot(g * u) + tau * Roughness(basis, u);
    if (norm_sq > 0.0) u /= std::sqrt(norm_sq);
    return u;
  };
  std::vector<VectorXd> dirs_x;
  std::vector<VectorXd> dirs_y;
  for (int r = 0; r < n_dirs; ++r) {
    VectorXd u(d);
    VectorXd v(d);
    for (Index j = 0; j < d; ++j) u[j] = normal(rng);
    for (Index j = 0; j < d; ++j) v[j] = normal(rng);
    dirs_x.push_back(unit(u, pop.xx));
    dirs_y.push_back(unit(v, pop.yy));
  }
  for (const auto& u : extra_x) dirs_x.push_back(unit(u, pop.xx));
  for (const auto& v : extra_y) dirs_y.push_back(unit(v, pop.yy));

  DiscrepancyEstimate out;
  const size_t pairs = std::min(dirs_x.size(), dirs_y.size());
  out.directions = static_cast<int>(pairs);
  for (size_t i = 0; i < pairs; ++i) {
    const VectorXd& u = dirs_x[i];
    const VectorXd& v = dirs_y[i];
    const Coassociation c = Coassociate(scores_x * u, scores_y * v, spec);
    const double pop_x = scale_factor * u.dot(pop.xx * u);
    const double pop_y = scale_factor * v.dot(pop.yy * v);
    const double pop_xy = scale_factor * u.dot(pop.xy * v);
    out.c_x = std::max(out.c_x, std::abs(c.sigma_u * c.sigma_u - pop_x));
    out.c_y = std::max(out.c_y, std::abs(c.sigma_v * c.sigma_v - pop_y));
    out.c_xy = std::max(out.c_xy, std::abs(c.gamma - pop_xy));
  }
  return out;
}

Summary Summarize(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  Summary out;
  out.count = static_cast<int>(values.size());
  if (values.empty()) {
    out.median = out.q1 = out.q3 = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  out.median = quantile(0.5);
  out.q1 = quantile(0.25);
  out.q3 = quantile(0.75);
  return out;
}

}  // namespace rscca
