#pragma once

#include <string>
#include <vector>

#include "rfkern/kernels.hpp"
#include "rfkern/types.hpp"

namespace rfkern {

// Survival SVM dual solution. alpha and alpha_star live in [0, cost]^n;
// alpha_star enters the predictor only where the event indicator is 1.
struct SsvmModel {
  Vector alpha;
  Vector alpha_star;
  double bias = 0.0;
  double cost = 1.0;
  std::string train_ref;

  // Solve diagnostics.
  bool converged = true;  // false when the iteration limit cut the solve short
  int iterations = 0;
  double jitter = 0.0;  // diagonal jitter added for a non-factorizable kernel
  std::vector<double> objective_trace;  // dual objective per accepted iterate
};

// Dual objective
//   1/2 sum_ik (a_i a_k + d_i d_k a*_i a*_k) K_ik - sum_ik a_i K_ik d_k a*_k
//   - sum_i a_i Y_i + sum_i d_i a*_i Y_i,
// i.e. 1/2 b' K b - Y' b with b = alpha - d .* alpha_star.
double dual_objective(const KernelMatrix& K, const SurvivalData& data, const Vector& alpha,
                      const Vector& alpha_star);

// Minimizes the dual over the box by projected gradient descent with a
// Barzilai-Borwein step and Armijo backtracking. Terminates when the
// projected-gradient infinity norm drops to tol (default 1e-6 * C) or after
// max_iter accepted steps (default 50 n); the iteration limit returns the
// best iterate with converged = false rather than failing. A kernel whose
// SPD factorization fails gets diagonal jitter from the lambda ladder before
// solving (recorded in the model).
SsvmModel solve_ssvm(const KernelMatrix& K, const SurvivalData& data, double cost = 1.0,
                     double tol = 0.0, int max_iter = 0);

// K_cross * (alpha - d .* alpha_star) + bias.
Vector prognostic_index(const SsvmModel& model, const KernelMatrix& K_cross,
                        const SurvivalData& train_data);

// Infinity norm of the projected gradient of the dual at the model's
// coefficients; zero exactly at first-order box-constrained optimality.
double kkt_violation(const KernelMatrix& K, const SurvivalData& data, const SsvmModel& model);

}  // namespace rfkern
