#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {
namespace {

constexpr double kPi = std::numbers::pi;

// Maximizes f over a box of angles by compass search with a shrinking step.
VectorXd CompassSearch(const std::function<double(const VectorXd&)>& f, VectorXd x, double step) {
  double best = f(x);
  while (step > 1e-12) {
    bool improved = false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      for (double sign : {1.0, -1.0}) {
        VectorXd y = x;
        y[i] += sign * step;
        const double v = f(y);
        if (v > best) {
          best = v;
          x = y;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return x;
}

VectorXd Sphere3(double theta, double phi) {
  VectorXd out(3);
  out << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
  return out;
}

VectorXd Circle(double t) {
  VectorXd out(2);
  out << std::cos(t), std::sin(t);
  return out;
}

}  // namespace

double Simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

double Fourier(int j, double t, double a, double len) {
  if (j == 0) return 1.0 / std::sqrt(len);
  const int k = (j + 1) / 2;
  const double arg = 2.0 * kPi * k * (t - a) / len;
  return std::sqrt(2.0 / len) * (j % 2 == 1 ? std::sin(arg) : std::cos(arg));
}

double SortedMedian(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const size_t n = x.size();
  return n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double NaiveMad(const VectorXd& x, double c) {
  const double med = SortedMedian(std::vector<double>(x.data(), x.data() + x.size()));
  std::vector<double> dev;
  for (Eigen::Index i = 0; i < x.size(); ++i) dev.push_back(std::abs(x[i] - med));
  return c * SortedMedian(dev);
}

double NaiveSd(const VectorXd& x) { return std::sqrt(NaiveCov(x, x)); }

double NaiveCov(const VectorXd& u, const VectorXd& v) {
  double mu = 0.0;
  double mv = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= static_cast<double>(u.size());
  mv /= static_cast<double>(v.size());
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += (u[i] - mu) * (v[i] - mv);
  return s / static_cast<double>(u.size() - 1);
}

double PearsonCorr(const VectorXd& u, const VectorXd& v) {
  return NaiveCov(u, v) / std::sqrt(NaiveCov(u, u) * NaiveCov(v, v));
}

double MScaleReweighted(const VectorXd& x, double tuning, double b) {
  const double med = SortedMedian(std::vector<double>(x.data(), x.data() + x.size()));
  auto rho = [&](double r) {
    const double z = r / tuning;
    if (std::abs(z) >= 1.0) return 1.0;
    const double w = 1.0 - z * z;
    return 1.0 - w * w * w;
  };
  double s = NaiveMad(x, 1.4826);
  if (!(s > 0.0)) return 0.0;
  for (int it = 0; it < 100000; ++it) {
    double mean = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) mean += rho((x[i] - med) / s);
    mean /= static_cast<double>(x.size());
    const double next = s * std::sqrt(mean / b);
    if (std::abs(next - s) <= 1e-15 * s) return next;
    s = next;
  }
  return s;
}

MatrixXd CovBlock(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) out(i, j) = NaiveCov(a.col(i), b.col(j));
  }
  return out;
}

double TextbookCcaLambda(const MatrixXd& sx, const MatrixXd& sy) {
  const MatrixXd cxx = CovBlock(sx, sx);
  const MatrixXd cyy = CovBlock(sy, sy);
  const MatrixXd cxy = CovBlock(sx, sy);
  const MatrixXd m = cxx.inverse() * cxy * cyy.inverse() * cxy.transpose();
  const Eigen::EigenSolver<MatrixXd> es(m);
  return es.eigenvalues().real().maxCoeff();
}

double ClassicalRatio(const VectorXd& a, const VectorXd& b, const MatrixXd& cxx,
                      const MatrixXd& cyy, const MatrixXd& cxy, const MatrixXd& r, double tau) {
  const double num = a.dot(cxy * b);
  return num * num / ((a.dot(cxx * a) + tau * a.dot(r * a)) * (b.dot(cyy * b) + tau * b.dot(r * b)));
}

SearchResult GridSearch2(const MatrixXd& sx, const MatrixXd& sy, const MatrixXd& r, double tau,
                         int points) {
  const MatrixXd cxx = CovBlock(sx, sx);
  const MatrixXd cyy = CovBlock(sy, sy);
  const MatrixXd cxy = CovBlock(sx, sy);
  auto f = [&](const VectorXd& ang) {
    return ClassicalRatio(Circle(ang[0]), Circle(ang[1]), cxx, cyy, cxy, r, tau);
  };
  VectorXd best(2);
  double best_value = -1.0;
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < points; ++j) {
      VectorXd ang(2);
      ang << kPi * i / points, kPi * j / points;
      const double v = f(ang);
      if (v > best_value) {
        best_value = v;
        best = ang;
      }
    }
  }
  best = CompassSearch(f, best, kPi / points);
  return {f(best), Circle(best[0]), Circle(best[1])};
}

SearchResult GridSearch3(const MatrixXd& sx, const MatrixXd& sy, const MatrixXd& r, double tau,
                         int points) {
  const MatrixXd cxx = CovBlock(sx, sx);
  const MatrixXd cyy = CovBlock(sy, sy);
  const MatrixXd cxy = CovBlock(sx, sy);
  const MatrixXd myy_inv = (cyy + tau * r).inverse();
  // max over beta of (a'Cxy b)^2 / (b'Myy b) equals a'Cxy Myy^-1 Cyx a.
  auto f = [&](const VectorXd& ang) {
    const VectorXd a = Sphere3(ang[0], ang[1]);
    return a.dot(cxy * myy_inv * cxy.transpose() * a) / (a.dot(cxx * a) + tau * a.dot(r * a));
  };
  VectorXd best(2);
  double best_value = -1.0;
  for (int i = 0; i <= points; ++i) {
    for (int j = 0; j < 2 * points; ++j) {
      VectorXd ang(2);
      ang << kPi * i / points, kPi * j / points;
      const double v = f(ang);
      if (v > best_value) {
        best_value = v;
        best = ang;
      }
    }
  }
  best = CompassSearch(f, best, kPi / points);
  const VectorXd a = Sphere3(best[0], best[1]);
  const VectorXd b = myy_inv * cxy.transpose() * a;
  return {f(best), a, b.normalized()};
}

double PopulationLambda(const MatrixXd& cov, int k) {
  const MatrixXd sxx = cov.topLeftCorner(k, k);
  const MatrixXd syy = cov.bottomRightCorner(k, k);
  const MatrixXd sxy = cov.topRightCorner(k, k);
  const MatrixXd m = sxx.inverse() * sxy * syy.inverse() * sxy.transpose();
  const Eigen::EigenSolver<MatrixXd> es(m);
  return es.eigenvalues().real().maxCoeff();
}

MatrixXd BivariateSample(int n, double rho, std::mt19937_64& rng, double t_df) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(t_df > 0.0 ? t_df : 1.0);
  MatrixXd out(n, 2);
  const double c = std::sqrt(1.0 - rho * rho);
  for (int i = 0; i < n; ++i) {
    const double z1 = normal(rng);
    const double z2 = normal(rng);
    out(i, 0) = z1;
    out(i, 1) = rho * z1 + c * z2;
    if (t_df > 0.0) out.row(i) /= std::sqrt(chi2(rng) / t_df);
  }
  return out;
}

double AngleDeg(const VectorXd& u, const VectorXd& v, const MatrixXd& g) {
  const double c = std::abs(u.dot(g * v)) / std::sqrt(u.dot(g * u) * v.dot(g * v));
  return std::acos(std::min(1.0, c)) * 180.0 / kPi;
}

}  // namespace oracle
