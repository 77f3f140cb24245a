#pragma once

#include <string>

#include "rfkern/kernels.hpp"
#include "rfkern/types.hpp"

namespace rfkern {

// Kernel ridge regression in dual form: alpha solves (K + lambda I) alpha = y.
struct KrrModel {
  Vector alpha;
  double lambda = 0.0;
  std::string train_ref;
};

// Smallest lambda on the ladder lambda0 * 2^k (lambda0 = 1e-8 * mean
// diagonal) for which the SPD factorization of K + lambda I succeeds.
// Throws LadderExhausted after 64 doublings.
double select_lambda(const KernelMatrix& K);
double select_lambda(const Matrix& K);

// Solves via Cholesky factorization plus iterative refinement; the result
// satisfies ||(K + lambda I) alpha - y||_inf <= 1e-8 (1 + ||y||_inf).
KrrModel fit_krr(const KernelMatrix& K, const Vector& y, double lambda);

// K_cross is (test x train); returns K_cross * alpha.
Vector predict_krr(const KrrModel& model, const KernelMatrix& K_cross);

// Sign of the prediction with exact 0 mapped to +1.
Vector classify_krr(const KrrModel& model, const KernelMatrix& K_cross);

}  // namespace rfkern
