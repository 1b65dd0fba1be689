#include "rscca/nelder_mead.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace rscca {

NelderMeadResult NelderMeadMinimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0, const NelderMeadOptions& options) {
  using Eigen::VectorXd;
  const Eigen::Index n = x0.size();
  std::vector<VectorXd> simplex(static_cast<size_t>(n + 1), x0);
  std::vector<double> values(static_cast<size_t>(n + 1));
  NelderMeadResult result;
  auto eval = [&](const VectorXd& x) {
    ++result.evaluations;
    return f(x);
  };
  values[0] = eval(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    simplex[static_cast<size_t>(i + 1)][i] += options.step;
    values[static_cast<size_t>(i + 1)] = eval(simplex[static_cast<size_t>(i + 1)]);
  }

  std::vector<size_t> order(simplex.size());
  while (true) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] < values[b]; });
    const size_t best = order.front();
    const size_t worst = order.back();
    const size_t second_worst = order[order.size() - 2];

    double spread = values[worst] - values[best];
    double size = 0.0;
    for (size_t i = 0; i < simplex.size(); ++i) {
      size = std::max(size, (simplex[i] - simplex[best]).cwiseAbs().maxCoeff());
    }
    if (spread <= options.ftol && size <= options.xtol) {
      result.converged = true;
      break;
    }
    if (size <= 1e-3 * options.xtol) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evals) break;

    VectorXd centroid = VectorXd::Zero(n);
    for (size_t i = 0; i < simplex.size(); ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[best]) {
      const VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const VectorXd contracted = outside ? VectorXd(centroid + 0.5 * (reflected - centroid))
                                        : VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }
  const auto best = static_cast<size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  return result;
}

}  // namespace rscca
