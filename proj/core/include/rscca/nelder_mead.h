#ifndef RSCCA_NELDER_MEAD_H_
#define RSCCA_NELDER_MEAD_H_

#include <functional>

#include <Eigen/Dense>

namespace rscca {

struct NelderMeadOptions {
  double step = 0.3;        // edge length of the initial axis-aligned simplex
  long max_evals = 2000;
  double ftol = 1e-13;      // spread of vertex values
  double xtol = 1e-9;       // max distance from the best vertex
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;
};

// Minimizes f from x0. The start point is a vertex of the initial simplex, so
// the returned value never exceeds f(x0).
NelderMeadResult NelderMeadMinimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0, const NelderMeadOptions& options);

}  // namespace rscca

#endif  // RSCCA_NELDER_MEAD_H_
