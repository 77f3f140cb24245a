#include "rfkern/ssvm.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <iostream>

#include "rfkern/krr.hpp"

namespace rfkern {

namespace {

Vector event_vector(const SurvivalData& data) {
  Vector d(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i)
    d[i] = static_cast<double>(data.event[static_cast<std::size_t>(i)]);
  return d;
}

void check_problem(const KernelMatrix& K, const SurvivalData& data) {
  if (!K.square()) throw ShapeMismatchError("ssvm: kernel matrix must be square");
  if (data.size() != K.rows()) throw ShapeMismatchError("ssvm: survival data length mismatch");
}

// Projected gradient for the box [0, C]^m.
double projected_gradient_norm(const Vector& x, const Vector& g, double C) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double pg = g[i];
    if (x[i] <= 0.0)
      pg = std::min(pg, 0.0);
    else if (x[i] >= C)
      pg = std::max(pg, 0.0);
    norm = std::max(norm, std::fabs(pg));
  }
  return norm;
}

}  // namespace

double dual_objective(const KernelMatrix& K, const SurvivalData& data, const Vector& alpha,
                      const Vector& alpha_star) {
  check_problem(K, data);
  if (alpha.size() != K.rows() || alpha_star.size() != K.rows())
    throw ShapeMismatchError("ssvm: coefficient length mismatch");
  const Vector d = event_vector(data);
  const Vector beta = alpha - d.cwiseProduct(alpha_star);
  return 0.5 * beta.dot(K.values * beta) - data.time.dot(beta);
}

SsvmModel solve_ssvm(const KernelMatrix& K, const SurvivalData& data, double cost, double tol,
                     int max_iter) {
  check_problem(K, data);
  data.validate();
  if (!(cost > 0.0)) throw DataError("ssvm: cost must be positive");
  const auto n = K.rows();
  if (tol <= 0.0) tol = 1e-6 * cost;
  if (max_iter <= 0) max_iter = 50 * static_cast<int>(n);

  SsvmModel model;
  model.cost = cost;
  model.train_ref = "n=" + std::to_string(n);

  // PSD repair: jitter the diagonal when the factorization check fails.
  Matrix Ks = K.values;
  {
    Eigen::LLT<Matrix> llt(Ks);
    if (llt.info() != Eigen::Success) {
      model.jitter = select_lambda(K.values);
      Ks.diagonal().array() += model.jitter;
      std::clog << "ssvm: kernel not factorizable, added diagonal jitter " << model.jitter
                << "\n";
    }
  }

  const Vector d = event_vector(data);
  const Vector& y = data.time;

  // State z = [alpha; alpha_star].
  Vector z = Vector::Zero(2 * n);
  auto beta_of = [&](const Vector& v) -> Vector {
    return v.head(n) - d.cwiseProduct(v.tail(n));
  };
  auto objective = [&](const Vector& v, Vector& kb_out) {
    const Vector beta = beta_of(v);
    kb_out.noalias() = Ks * beta;
    return 0.5 * beta.dot(kb_out) - y.dot(beta);
  };

  Vector kb(n);
  double f = objective(z, kb);
  if (!std::isfinite(f)) throw NonFiniteObjectiveError("ssvm: objective is not finite");
  model.objective_trace.push_back(f);

  Vector g(2 * n), g_prev(2 * n), z_prev(2 * n);
  auto gradient = [&](const Vector& kb_in, Vector& out) {
    const Vector q = kb_in - y;
    out.head(n) = q;
    out.tail(n) = -d.cwiseProduct(q);
  };
  gradient(kb, g);

  double step = 1.0 / std::max(1e-12, Ks.diagonal().mean());
  bool have_prev = false;
  model.converged = false;

  Vector trial(2 * n), kb_trial(n);
  for (int it = 0; it < max_iter; ++it) {
    if (projected_gradient_norm(z, g, cost) <= tol) {
      model.converged = true;
      break;
    }

    if (have_prev) {
      const Vector s = z - z_prev;
      const Vector w = g - g_prev;
      const double sw = s.dot(w);
      if (sw > 0.0) step = std::min(1e12, std::max(1e-12, s.dot(s) / sw));
    }

    double t = step;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      trial = (z - t * g).cwiseMax(0.0).cwiseMin(cost);
      const double f_trial = objective(trial, kb_trial);
      if (!std::isfinite(f_trial)) throw NonFiniteObjectiveError("ssvm: objective is not finite");
      const double move = (trial - z).squaredNorm();
      if (move == 0.0) break;  // projection pinned every coordinate
      if (f_trial <= f - 1e-4 / t * move) {
        z_prev = z;
        g_prev = g;
        z = trial;
        kb = kb_trial;
        f = f_trial;
        gradient(kb, g);
        have_prev = true;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    model.iterations = it + 1;
    if (!accepted) {
      // No descent step exists at numerical resolution.
      model.converged = projected_gradient_norm(z, g, cost) <= tol;
      break;
    }
    model.objective_trace.push_back(f);
  }
  if (!model.converged && projected_gradient_norm(z, g, cost) <= tol) model.converged = true;
  if (!model.converged)
    std::clog << "ssvm: iteration limit reached (" << model.iterations
              << " steps), returning best iterate\n";

  model.alpha = z.head(n);
  model.alpha_star = z.tail(n);

  // Bias from rows with strictly interior alpha; the dual itself does not
  // pin b, and every evaluation metric downstream is translation-invariant.
  const Vector fit = K.values * beta_of(z);
  std::vector<double> resid;
  for (Eigen::Index i = 0; i < n; ++i)
    if (model.alpha[i] > 0.0 && model.alpha[i] < cost) resid.push_back(y[i] - fit[i]);
  if (!resid.empty()) {
    std::sort(resid.begin(), resid.end());
    const std::size_t mid = resid.size() / 2;
    model.bias = resid.size() % 2 == 1 ? resid[mid] : 0.5 * (resid[mid - 1] + resid[mid]);
  }
  return model;
}

Vector prognostic_index(const SsvmModel& model, const KernelMatrix& K_cross,
                        const SurvivalData& train_data) {
  if (K_cross.cols() != model.alpha.size())
    throw ShapeMismatchError("prognostic_index: kernel columns must match training size");
  if (train_data.size() != model.alpha.size())
    throw ShapeMismatchError("prognostic_index: training data length mismatch");
  const Vector d = event_vector(train_data);
  const Vector beta = model.alpha - d.cwiseProduct(model.alpha_star);
  return (K_cross.values * beta).array() + model.bias;
}

double kkt_violation(const KernelMatrix& K, const SurvivalData& data, const SsvmModel& model) {
  check_problem(K, data);
  if (model.alpha.size() != K.rows() || model.alpha_star.size() != K.rows())
    throw ShapeMismatchError("kkt_violation: coefficient length mismatch");
  const auto n = K.rows();
  const Vector d = event_vector(data);
  const Vector beta = model.alpha - d.cwiseProduct(model.alpha_star);
  const Vector q = K.values * beta - data.time;
  Vector z(2 * n), g(2 * n);
  z.head(n) = model.alpha;
  z.tail(n) = model.alpha_star;
  g.head(n) = q;
  g.tail(n) = -d.cwiseProduct(q);
  return projected_gradient_norm(z, g, model.cost);
}

}  // namespace rfkern
