#include <cmath>
#include <string>

#include "rscca/error.h"
#include "rscca/robust_measures.h"

namespace rscca {
namespace {

void CheckPair(const VecRef& u, const VecRef& v) {
  if (u.size() != v.size()) {
    throw InputError("paired samples differ in length: " + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()));
  }
  if (u.size() < 2) throw InputError("co-association needs at least two pairs");
}

Coassociation Degenerate(double sigma_u, double sigma_v) {
  Coassociation out;
  out.status = MarginStatus::kDegenerate;
  out.sigma_u = sigma_u;
  out.sigma_v = sigma_v;
  return out;
}

Coassociation FromScatter(const BivariateScatter& s) {
  const double su = std::sqrt(std::max(0.0, s.w(0, 0)));
  const double sv = std::sqrt(std::max(0.0, s.w(1, 1)));
  const AssocValue a = AssocFromScatter(s);
  if (a.status == MarginStatus::kDegenerate) return Degenerate(su, sv);
  Coassociation out;
  out.gamma = s.w(0, 1);
  out.sigma_u = su;
  out.sigma_v = sv;
  out.rho = a.rho;
  return out;
}

}  // namespace

void Validate(const AssociationSpec& spec) {
  Validate(spec.scale);
  if (spec.kind == AssociationKind::kMScatter) {
    if (!(spec.scatter.quantile > 0.0 && spec.scatter.quantile < 1.0)) {
      throw InputError("M-scatter quantile must lie in (0, 1)");
    }
    if (spec.scatter.max_iter < 1) throw InputError("M-scatter needs max_iter >= 1");
    if (!(spec.scatter.tol > 0.0)) throw InputError("M-scatter tolerance must be positive");
  }
}

bool IsBounded(AssociationKind kind) { return kind != AssociationKind::kGkStar; }

std::string_view ToString(AssociationKind kind) {
  switch (kind) {
    case AssociationKind::kCovPearson:
      return "cov_pearson";
    case AssociationKind::kGkStar:
      return "gk_star";
    case AssociationKind::kGkBounded:
      return "gk_bounded";
    case AssociationKind::kMScatter:
      return "m_scatter";
    case AssociationKind::kOgk:
      return "ogk";
  }
  return "";
}

AssociationKind ParseAssociationKind(std::string_view text) {
  if (text == "cov_pearson") return AssociationKind::kCovPearson;
  if (text == "gk_star") return AssociationKind::kGkStar;
  if (text == "gk_bounded") return AssociationKind::kGkBounded;
  if (text == "m_scatter") return AssociationKind::kMScatter;
  if (text == "ogk") return AssociationKind::kOgk;
  throw InputError("unknown association kind '" + std::string(text) + "'");
}

GkResult CoassocGk(const VecRef& u, const VecRef& v, const ScaleSpec& scale, bool bounded) {
  CheckPair(u, v);
  GkResult out;
  out.sigma_u = Scale(u, scale);
  out.sigma_v = Scale(v, scale);
  if (!(out.sigma_u > 0.0) || !(out.sigma_v > 0.0)) {
    out.status = MarginStatus::kDegenerate;
    return out;
  }
  const VectorXd su = u / out.sigma_u;
  const VectorXd sv = v / out.sigma_v;
  const double sp = Scale(su + sv, scale);
  const double sm = Scale(su - sv, scale);
  out.sigma_plus_sq = sp * sp;
  out.sigma_minus_sq = sm * sm;
  const double diff = out.sigma_plus_sq - out.sigma_minus_sq;
  if (bounded) {
    const double total = out.sigma_plus_sq + out.sigma_minus_sq;
    out.rho = total > 0.0 ? diff / total : 0.0;
  } else {
    out.rho = 0.25 * diff;
  }
  out.gamma = out.sigma_u * out.sigma_v * out.rho;
  return out;
}

Coassociation Coassociate(const VecRef& u, const VecRef& v, const AssociationSpec& spec) {
  CheckPair(u, v);
  switch (spec.kind) {
    case AssociationKind::kCovPearson: {
      const double n1 = static_cast<double>(u.size() - 1);
      const auto cu = u.array() - u.mean();
      const auto cv = v.array() - v.mean();
      const double su = std::sqrt(cu.square().sum() / n1);
      const double sv = std::sqrt(cv.square().sum() / n1);
      if (!(su > 0.0) || !(sv > 0.0)) return Degenerate(su, sv);
      Coassociation out;
      out.gamma = (cu * cv).sum() / n1;
      out.sigma_u = su;
      out.sigma_v = sv;
      out.rho = out.gamma / (su * sv);
      return out;
    }
    case AssociationKind::kGkStar:
    case AssociationKind::kGkBounded: {
      const bool bounded = spec.kind == AssociationKind::kGkBounded;
      const GkResult gk = CoassocGk(u, v, spec.scale, bounded);
      if (gk.status == MarginStatus::kDegenerate) return Degenerate(gk.sigma_u, gk.sigma_v);
      Coassociation out;
      out.gamma = gk.gamma;
      out.sigma_u = gk.sigma_u;
      out.sigma_v = gk.sigma_v;
      out.rho = gk.rho;
      out.rho_exceeds_unit = std::abs(gk.rho) > 1.0;
      return out;
    }
    case AssociationKind::kMScatter:
      return FromScatter(ScatterM(u, v, spec.scatter));
    case AssociationKind::kOgk:
      return FromScatter(ScatterOgk(u, v, spec.scale));
  }
  return Degenerate(0.0, 0.0);
}

}  // namespace rscca
