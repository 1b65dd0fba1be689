#ifndef RSCCA_FIT_INTERNAL_H_
#define RSCCA_FIT_INTERNAL_H_

#include "rscca/scca.h"

namespace rscca::internal {

// Normalizes (alpha, beta), evaluates lambda_hat and the unpenalized value,
// and fills the penalized-unit copies.
void FinalizeFit(const ObjectiveContext& ctx, const VectorXd& alpha, const VectorXd& beta,
                 SccaFit& fit);

// Centered cross-product blocks with the n - 1 denominator.
struct CovarianceBlocks {
  MatrixXd xx;
  MatrixXd yy;
  MatrixXd xy;
};
CovarianceBlocks SampleCovariances(const MatrixXd& x, const MatrixXd& y);

}  // namespace rscca::internal

#endif  // RSCCA_FIT_INTERNAL_H_
