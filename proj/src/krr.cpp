#include "rfkern/krr.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace rfkern {

namespace {

void check_square_symmetric(const Matrix& K) {
  if (K.rows() != K.cols()) throw ShapeMismatchError("kernel matrix must be square");
  if (K.rows() == 0) throw EmptyDataError("kernel matrix is empty");
}

}  // namespace

double select_lambda(const Matrix& K) {
  check_square_symmetric(K);
  double lambda0 = 1e-8 * K.diagonal().mean();
  if (!(lambda0 > 0.0)) lambda0 = 1e-8;
  Matrix work(K.rows(), K.cols());
  double lambda = lambda0;
  for (int k = 0; k < 64; ++k, lambda *= 2.0) {
    work = K;
    work.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(work);
    if (llt.info() == Eigen::Success) return lambda;
  }
  throw LadderExhaustedError("no ladder rung made K + lambda I factorizable");
}

double select_lambda(const KernelMatrix& K) { return select_lambda(K.values); }

KrrModel fit_krr(const KernelMatrix& K, const Vector& y, double lambda) {
  check_square_symmetric(K.values);
  if (y.size() != K.rows()) throw ShapeMismatchError("fit_krr: target length mismatch");
  if (!(lambda > 0.0)) throw DataError("fit_krr: lambda must be positive");

  Matrix A = K.values;
  A.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success)
    throw FactorizationFailureError("fit_krr: K + lambda I is not factorizable");

  Vector alpha = llt.solve(y);
  const double bound = 1e-8 * (1.0 + y.lpNorm<Eigen::Infinity>());
  // Iterative refinement until the solve contract holds.
  double resid = (A * alpha - y).lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 10 && resid > bound; ++it) {
    alpha += llt.solve(y - A * alpha);
    const double next = (A * alpha - y).lpNorm<Eigen::Infinity>();
    if (next >= resid) break;
    resid = next;
  }
  if (!(resid <= bound))
    throw FactorizationFailureError("fit_krr: residual exceeds solve tolerance");

  KrrModel model;
  model.alpha = std::move(alpha);
  model.lambda = lambda;
  model.train_ref = "n=" + std::to_string(K.rows());
  return model;
}

Vector predict_krr(const KrrModel& model, const KernelMatrix& K_cross) {
  if (K_cross.cols() != model.alpha.size())
    throw ShapeMismatchError("predict_krr: kernel columns must match training size");
  return K_cross.values * model.alpha;
}

Vector classify_krr(const KrrModel& model, const KernelMatrix& K_cross) {
  Vector score = predict_krr(model, K_cross);
  for (Eigen::Index i = 0; i < score.size(); ++i) score[i] = score[i] >= 0.0 ? 1.0 : -1.0;
  return score;
}

}  // namespace rfkern
