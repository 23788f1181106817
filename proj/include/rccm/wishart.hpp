#pragma once

#include "rccm/linalg.hpp"

namespace rccm {

// log Gamma_p(a) = p(p-1)/4 * log(pi) + sum_{j=1..p} lgamma(a + (1-j)/2).
// Requires a > (p-1)/2.
double log_multivariate_gamma(int p, double a);

// Log density at Omega of the Wishart distribution with df scaling such that
// the mean is Omega0: scale matrix Omega0 / df, degrees of freedom df.
// Requires df > p - 1 and both matrices symmetric positive definite.
double wishart_log_density(const Matrix& omega, double df, const Matrix& omega0);

}  // namespace rccm
