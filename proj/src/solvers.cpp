#include "rccm/solvers.hpp"

#include <cmath>
#include <limits>

namespace rccm {

namespace {

constexpr double kZeroPenalty = 1e-12;

void check_glasso_inputs(const Matrix& S, double lambda) {
  require_symmetric(S, "covariance input");
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw InvalidInputError("penalty must be finite and non-negative");
  if ((S.diagonal().array() <= 0.0).any())
    throw InvalidInputError("covariance input needs a strictly positive diagonal");
}

// Crossproduct of the fitted covariance column against the active
// coefficients, skipping position j itself.
double partial_residual(const Matrix& W, const Matrix& B, int j, int l, int p) {
  double acc = 0.0;
  for (int m = 0; m < p; ++m) {
    if (m == j || m == l) continue;
    acc += W(l, m) * B(m, j);
  }
  return acc;
}

}  // namespace

double glasso_objective(const Matrix& S, double lambda, const Matrix& omega) {
  return (S.cwiseProduct(omega)).sum() - log_det_spd(omega, "precision iterate") +
         lambda * offdiag_abs_sum(omega);
}

double glasso_kkt_residual(const Matrix& S, double lambda, const Matrix& omega) {
  const Matrix W = spd_inverse(omega, "precision iterate");
  const int p = static_cast<int>(S.rows());
  double r = 0.0;
  for (int i = 0; i < p; ++i) {
    r = std::max(r, std::abs(S(i, i) - W(i, i)));
    for (int j = i + 1; j < p; ++j) {
      const double d = S(i, j) - W(i, j);
      if (omega(i, j) != 0.0) {
        r = std::max(r, std::abs(d + lambda * (omega(i, j) > 0.0 ? 1.0 : -1.0)));
      } else {
        r = std::max(r, std::max(0.0, std::abs(d) - lambda));
      }
    }
  }
  return r;
}

Matrix glasso_fit(const Matrix& S, double lambda, const SolverOptions& opts) {
  check_glasso_inputs(S, lambda);
  const int p = static_cast<int>(S.rows());

  if (p == 1) {
    Matrix out(1, 1);
    out(0, 0) = 1.0 / S(0, 0);
    return out;
  }
  // An effectively zero penalty has the closed-form minimizer S^{-1}.
  if (lambda <= kZeroPenalty) {
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success)
      throw InvalidInputError(
          "covariance input must be positive definite when the penalty is zero");
    return llt.solve(Matrix::Identity(p, p));
  }

  // W tracks the fitted covariance (diagonal pinned to S), B the per-column
  // lasso coefficients: omega_{-j,j} = -B_{-j,j} * omega_jj. Starting W at S
  // keeps the per-column quadratics coupled from the first sweep.
  Matrix W = S;
  Matrix B = Matrix::Zero(p, p);
  if (opts.warm_start) {
    const Matrix& omega0 = *opts.warm_start;
    if (omega0.rows() == p && omega0.cols() == p && is_symmetric(omega0)) {
      Eigen::LLT<Matrix> llt(omega0);
      if (llt.info() == Eigen::Success) {
        Matrix Wtry = llt.solve(Matrix::Identity(p, p));
        Wtry.diagonal() = S.diagonal();
        if (cholesky_ok(Wtry)) {
          W = Wtry;
          for (int j = 0; j < p; ++j)
            for (int i = 0; i < p; ++i)
              if (i != j) B(i, j) = -omega0(i, j) / omega0(j, j);
        }
      }
    }
  }

  const double inner_tol = std::max(opts.tolerance * 1e-2, 1e-13);
  const int max_inner = 200;
  Matrix omega = Matrix::Zero(p, p);
  double residual = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    for (int j = 0; j < p; ++j) {
      for (int sweep = 0; sweep < max_inner; ++sweep) {
        double change = 0.0;
        for (int l = 0; l < p; ++l) {
          if (l == j) continue;
          const double r = S(l, j) - partial_residual(W, B, j, l, p);
          const double updated = soft_threshold(r, lambda) / W(l, l);
          change = std::max(change, std::abs(updated - B(l, j)));
          B(l, j) = updated;
        }
        if (change < inner_tol) break;
      }
      for (int l = 0; l < p; ++l) {
        if (l == j) continue;
        double w = 0.0;
        for (int m = 0; m < p; ++m)
          if (m != j) w += W(l, m) * B(m, j);
        W(l, j) = w;
      }
      W.row(j) = W.col(j).transpose();
      W(j, j) = S(j, j);
    }

    // Transient non-positive partial variances can appear mid-path; they only
    // matter if they survive to the last iteration.
    bool valid = true;
    for (int j = 0; j < p && valid; ++j) {
      double fitted = 0.0;
      for (int m = 0; m < p; ++m)
        if (m != j) fitted += W(m, j) * B(m, j);
      const double denom = S(j, j) - fitted;
      if (!(denom > 0.0) || !std::isfinite(denom)) {
        valid = false;
        break;
      }
      omega(j, j) = 1.0 / denom;
      for (int i = 0; i < p; ++i)
        if (i != j) omega(i, j) = -B(i, j) * omega(j, j);
    }
    if (!valid) {
      if (iter == opts.max_iterations)
        throw NumericError(
            "graphical lasso produced a non-positive partial variance");
      continue;
    }
    symmetrize(omega);

    if (cholesky_ok(omega)) {
      residual = glasso_kkt_residual(S, lambda, omega);
      if (residual < opts.tolerance) return omega;
    }
  }
  throw ConvergenceError("graphical lasso did not converge", omega, residual,
                         opts.max_iterations);
}

double covglasso_objective(const Matrix& A, double rho, const Matrix& sigma) {
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw InvalidInputError("covariance iterate is not positive definite");
  const Matrix AinvS = llt.solve(A);
  return AinvS.trace() + 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum() +
         rho * offdiag_abs_sum(sigma);
}

double covglasso_kkt_residual(const Matrix& A, double rho, const Matrix& sigma) {
  const Matrix inv = spd_inverse(sigma, "covariance iterate");
  const Matrix M = inv - inv * A * inv;
  const int p = static_cast<int>(A.rows());
  double r = 0.0;
  for (int i = 0; i < p; ++i) {
    r = std::max(r, std::abs(M(i, i)));
    for (int j = i + 1; j < p; ++j) {
      if (sigma(i, j) != 0.0) {
        r = std::max(r, std::abs(M(i, j) + rho * (sigma(i, j) > 0.0 ? 1.0 : -1.0)));
      } else {
        r = std::max(r, std::max(0.0, std::abs(M(i, j)) - rho));
      }
    }
  }
  return r;
}

namespace {

// Smooth part of the majorized objective: tr(A X^{-1}) + tr(Ct X).
double surrogate_smooth(const Matrix& A, const Matrix& Ct, const Matrix& X,
                        const Matrix& Xinv) {
  return (Xinv * A).trace() + Ct.cwiseProduct(X).sum();
}

Matrix prox_offdiag(const Matrix& X, double t) {
  Matrix Y = X;
  const int p = static_cast<int>(X.rows());
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) Y(i, j) = soft_threshold(X(i, j), t);
  return Y;
}

}  // namespace

Matrix covglasso_fit(const Matrix& A, double rho, const SolverOptions& opts) {
  require_symmetric(A, "scatter input");
  if (!std::isfinite(rho) || rho < 0.0)
    throw InvalidInputError("penalty must be finite and non-negative");
  if (!cholesky_ok(A))
    throw InvalidInputError("scatter input must be positive definite");
  if (rho == 0.0) return A;

  Matrix sigma = A;
  if (opts.warm_start) {
    const Matrix& w = *opts.warm_start;
    if (w.rows() == A.rows() && w.cols() == A.cols() && is_symmetric(w) &&
        cholesky_ok(w))
      sigma = w;
    // Start from A when the objective there is better; keeps the descent
    // guarantee meaningful even for poor warm starts.
    if (covglasso_objective(A, rho, A) < covglasso_objective(A, rho, sigma))
      sigma = A;
  }

  const int p = static_cast<int>(A.rows());
  const int max_inner = 50;
  double residual = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    residual = covglasso_kkt_residual(A, rho, sigma);
    if (residual < opts.tolerance) return sigma;

    const Matrix Ct = spd_inverse(sigma, "covariance iterate");
    Matrix X = sigma;
    Matrix Xinv = Ct;
    double t = 1.0;
    for (int inner = 0; inner < max_inner; ++inner) {
      const Matrix grad = Ct - Xinv * A * Xinv;
      const double hX = surrogate_smooth(A, Ct, X, Xinv);
      bool accepted = false;
      double change = 0.0;
      while (t >= 1e-14) {
        Matrix Y = prox_offdiag(X - t * grad, t * rho);
        symmetrize(Y);
        Eigen::LLT<Matrix> llt(Y);
        if (llt.info() == Eigen::Success) {
          const Matrix Yinv = llt.solve(Matrix::Identity(p, p));
          const Matrix D = Y - X;
          const double hY = surrogate_smooth(A, Ct, Y, Yinv);
          if (hY <= hX + grad.cwiseProduct(D).sum() +
                        D.squaredNorm() / (2.0 * t) + 1e-12) {
            change = D.cwiseAbs().maxCoeff();
            X = Y;
            Xinv = Yinv;
            accepted = true;
            break;
          }
        }
        t *= 0.5;
      }
      if (!accepted || change < opts.tolerance * 0.1) break;
    }
    if (max_abs_diff(X, sigma) == 0.0) {
      // The surrogate could not be improved; a stalled step means we are at
      // numerical precision, so the current iterate is the answer.
      return sigma;
    }
    sigma = X;
  }
  throw ConvergenceError("covariance graphical lasso did not converge", sigma,
                         residual, opts.max_iterations);
}

}  // namespace rccm
