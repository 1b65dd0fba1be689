#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rscca/error.h"
#include "rscca/robust_measures.h"

namespace rscca {
namespace {

std::vector<double>& Scratch() {
  thread_local std::vector<double> buffer;
  return buffer;
}

double MedianInPlace(std::vector<double>& x) {
  const size_t n = x.size();
  const auto mid = x.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(x.begin(), mid, x.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(x.begin(), mid);
  return 0.5 * (lower + upper);
}

double StandardDeviation(const VecRef& x) {
  const double mean = x.mean();
  return std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size() - 1));
}

double Mad(const VecRef& x, double c) {
  auto& buf = Scratch();
  buf.assign(x.data(), x.data() + x.size());
  const double med = MedianInPlace(buf);
  for (Index i = 0; i < x.size(); ++i) buf[static_cast<size_t>(i)] = std::abs(x[i] - med);
  return c * MedianInPlace(buf);
}

double Bisquare(double r) {
  if (r >= 1.0 || r <= -1.0) return 1.0;
  const double t = 1.0 - r * r;
  return 1.0 - t * t * t;
}

// Mean bisquare loss of residuals / (c s) minus the target b.
double MScaleEquation(const std::vector<double>& resid, double s, double c, double b) {
  const double inv = 1.0 / (c * s);
  double sum = 0.0;
  for (double r : resid) sum += Bisquare(r * inv);
  return sum / static_cast<double>(resid.size()) - b;
}

double MScale(const VecRef& x, double c, double b) {
  auto& resid = Scratch();
  resid.assign(x.data(), x.data() + x.size());
  const double med = MedianInPlace(resid);
  resid.assign(x.data(), x.data() + x.size());
  size_t nonzero = 0;
  double max_abs = 0.0;
  for (double& r : resid) {
    r = std::abs(r - med);
    if (r > 0.0) ++nonzero;
    max_abs = std::max(max_abs, r);
  }
  // As s -> 0 the mean loss tends to the fraction of nonzero residuals.
  if (static_cast<double>(nonzero) / static_cast<double>(resid.size()) <= b) return 0.0;

  double hi = max_abs;
  while (MScaleEquation(resid, hi, c, b) > 0.0) hi *= 2.0;
  double lo = hi;
  while (MScaleEquation(resid, lo, c, b) <= 0.0) lo *= 0.5;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (MScaleEquation(resid, mid, c, b) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void Validate(const ScaleSpec& spec) {
  if (!(spec.mad_c > 0.0)) throw InputError("MAD constant must be positive");
  if (spec.kind == ScaleKind::kMScale) {
    if (!(spec.mscale_b > 0.0 && spec.mscale_b <= 0.5)) {
      throw InputError("M-scale target b must lie in (0, 0.5]");
    }
    if (!(spec.mscale_tuning > 0.0)) throw InputError("M-scale tuning constant must be positive");
  }
}

std::string_view ToString(ScaleKind kind) {
  switch (kind) {
    case ScaleKind::kSd:
      return "sd";
    case ScaleKind::kMad:
      return "mad";
    case ScaleKind::kMScale:
      return "mscale";
  }
  return "";
}

ScaleKind ParseScaleKind(std::string_view text) {
  if (text == "sd") return ScaleKind::kSd;
  if (text == "mad") return ScaleKind::kMad;
  if (text == "mscale") return ScaleKind::kMScale;
  throw InputError("unknown scale kind '" + std::string(text) + "'");
}

double Median(const VecRef& x) {
  if (x.size() == 0) throw InputError("median of an empty sample");
  auto& buf = Scratch();
  buf.assign(x.data(), x.data() + x.size());
  return MedianInPlace(buf);
}

double Scale(const VecRef& x, const ScaleSpec& spec) {
  if (x.size() < 2) throw InputError("scale needs at least two observations");
  switch (spec.kind) {
    case ScaleKind::kSd:
      return StandardDeviation(x);
    case ScaleKind::kMad:
      return Mad(x, spec.mad_c);
    case ScaleKind::kMScale:
      return MScale(x, spec.mscale_tuning, spec.mscale_b);
  }
  return 0.0;
}

}  // namespace rscca
