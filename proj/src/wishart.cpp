#include "rccm/wishart.hpp"

#include <cmath>

namespace rccm {

double log_multivariate_gamma(int p, double a) {
  if (p < 1) throw DomainError("dimension must be positive");
  if (!(a > 0.5 * (p - 1)))
    throw DomainError("argument must exceed (p - 1) / 2");
  double s = 0.25 * p * (p - 1) * std::log(M_PI);
  for (int j = 1; j <= p; ++j) s += std::lgamma(a + 0.5 * (1 - j));
  return s;
}

double wishart_log_density(const Matrix& omega, double df, const Matrix& omega0) {
  require_symmetric(omega, "sample matrix");
  require_symmetric(omega0, "mean matrix");
  if (omega.rows() != omega0.rows())
    throw InvalidInputError("sample and mean matrices must share dimensions");
  const int p = static_cast<int>(omega.rows());
  if (!(df > p - 1)) throw DomainError("degrees of freedom must exceed p - 1");

  const double logdet = log_det_spd(omega, "sample matrix");
  Eigen::LLT<Matrix> llt0(omega0);
  if (llt0.info() != Eigen::Success)
    throw InvalidInputError("mean matrix is not positive definite");
  const double logdet0 =
      2.0 * llt0.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double tr = llt0.solve(omega).trace();

  return 0.5 * (df - p - 1) * logdet - 0.5 * df * tr -
         0.5 * df * p * std::log(2.0) -
         0.5 * df * (logdet0 - p * std::log(df)) -
         log_multivariate_gamma(p, 0.5 * df);
}

}  // namespace rccm
