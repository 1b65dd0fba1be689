// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical routines; inputs and outputs are plain Eigen
// types.
#ifndef RSCCA_TESTS_ORACLES_H_
#define RSCCA_TESTS_ORACLES_H_

#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Composite Simpson rule with `intervals` (even) subintervals.
double Simpson(const std::function<double(double)>& f, double a, double b, int intervals);

// Fourier function j (0-based: constant, sin 1, cos 1, sin 2, ...) on [a, a + len].
double Fourier(int j, double t, double a, double len);

double SortedMedian(std::vector<double> x);
double NaiveMad(const VectorXd& x, double c);
double NaiveSd(const VectorXd& x);
double NaiveCov(const VectorXd& u, const VectorXd& v);
double PearsonCorr(const VectorXd& u, const VectorXd& v);

// Bisquare M-scale about the median by the reweighting iteration
// s^2 <- s^2 * mean(rho(r/s)) / b, run until the relative change is tiny.
double MScaleReweighted(const VectorXd& x, double tuning, double b);

// Largest eigenvalue of Cxx^-1 Cxy Cyy^-1 Cyx, by a nonsymmetric eigensolver.
double TextbookCcaLambda(const MatrixXd& sx, const MatrixXd& sy);

// Sample covariance blocks with the n-1 denominator.
MatrixXd CovBlock(const MatrixXd& a, const MatrixXd& b);

// Penalized classical ratio (a'Cxy b)^2 / ((a'Cxx a + tau a'Ra)(b'Cyy b + tau b'Rb)).
double ClassicalRatio(const VectorXd& a, const VectorXd& b, const MatrixXd& cxx,
                      const MatrixXd& cyy, const MatrixXd& cxy, const MatrixXd& r, double tau);

struct SearchResult {
  double value = 0.0;
  VectorXd a;
  VectorXd b;
};

// d = 2: exhaustive search over the product of two unit circles (`points`
// angles each), then compass-search refinement on the two angles.
SearchResult GridSearch2(const MatrixXd& sx, const MatrixXd& sy, const MatrixXd& r, double tau,
                         int points);

// d = 3: grid over the alpha sphere (spherical angles) with beta maximized in
// closed form for each alpha, then compass-search refinement.
SearchResult GridSearch3(const MatrixXd& sx, const MatrixXd& sy, const MatrixXd& r, double tau,
                         int points);

// Largest squared canonical correlation of a population covariance
// [[Sxx, Sxy], [Syx, Syy]] with k-dimensional blocks.
double PopulationLambda(const MatrixXd& cov, int k);

// n draws of a bivariate normal with unit variances and correlation rho,
// optionally divided by sqrt(chi2_df / df) per row.
MatrixXd BivariateSample(int n, double rho, std::mt19937_64& rng, double t_df = 0.0);

// Principal angle in degrees between span{u} and span{v} in the metric g.
double AngleDeg(const VectorXd& u, const VectorXd& v, const MatrixXd& g);

}  // namespace oracle

#endif  // RSCCA_TESTS_ORACLES_H_
