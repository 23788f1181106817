#pragma once

#include <optional>

#include "rccm/linalg.hpp"

namespace rccm {

struct SolverOptions {
  double tolerance = 1e-6;
  int max_iterations = 500;
  std::optional<Matrix> warm_start;
};

// minimize_Omega  tr(S Omega) - log|Omega| + lambda * sum_{i!=j} |omega_ij|
// over symmetric positive definite Omega; the diagonal is unpenalized.
// Block coordinate descent over columns of W = Omega^{-1}, so the fitted
// covariance satisfies W_ii = S_ii. lambda == 0 requires S positive definite
// and returns S^{-1} directly.
Matrix glasso_fit(const Matrix& S, double lambda, const SolverOptions& opts = {});

double glasso_objective(const Matrix& S, double lambda, const Matrix& omega);

// Largest violation of the stationarity conditions, with W = Omega^{-1}:
//   omega_ij != 0 : S_ij - W_ij + lambda * sign(omega_ij) = 0
//   omega_ij == 0 : |S_ij - W_ij| <= lambda
//   diagonal      : S_ii - W_ii = 0
double glasso_kkt_residual(const Matrix& S, double lambda, const Matrix& omega);

// minimize_Sigma  tr(A Sigma^{-1}) + log|Sigma| + rho * sum_{i!=j} |sigma_ij|
// over symmetric positive definite Sigma; the diagonal is unpenalized.
// Majorize-minimize: log|Sigma| is linearized at the current iterate and the
// convex surrogate is reduced by proximal gradient steps with backtracking,
// so the objective never rises above its value at the warm start (default A).
Matrix covglasso_fit(const Matrix& A, double rho, const SolverOptions& opts = {});

double covglasso_objective(const Matrix& A, double rho, const Matrix& sigma);

// Largest violation of stationarity, with M = Sigma^{-1} - Sigma^{-1} A Sigma^{-1}:
//   sigma_ij != 0, i != j : M_ij + rho * sign(sigma_ij) = 0
//   sigma_ij == 0         : |M_ij| <= rho
//   diagonal              : M_ii = 0
double covglasso_kkt_residual(const Matrix& A, double rho, const Matrix& sigma);

}  // namespace rccm
