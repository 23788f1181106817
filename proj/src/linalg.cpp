#include "rccm/linalg.hpp"

#include <cmath>
#include <string>

namespace rccm {

double max_abs_asymmetry(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.rows() == 0) return true;
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return max_abs_asymmetry(m) <= tol * scale;
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw InvalidInputError(std::string(what) + " must be square and non-empty");
}

void require_symmetric(const Matrix& m, const char* what) {
  require_square(m, what);
  if (!is_symmetric(m))
    throw InvalidInputError(std::string(what) + " must be symmetric");
}

bool cholesky_ok(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

double log_det_spd(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw InvalidInputError(std::string(what) + " is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Matrix spd_inverse(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw InvalidInputError(std::string(what) + " is not positive definite");
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

double min_eigenvalue_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void symmetrize(Matrix& m) { m = ((m + m.transpose()) * 0.5).eval(); }

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double offdiag_abs_sum(const Matrix& m) {
  return m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum();
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace rccm
