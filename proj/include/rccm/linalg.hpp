#pragma once

#include <Eigen/Dense>

#include "rccm/errors.hpp"

namespace rccm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

double max_abs_asymmetry(const Matrix& m);

// Symmetry to within an absolute tolerance scaled by the matrix magnitude.
bool is_symmetric(const Matrix& m, double tol = 1e-10);

void require_square(const Matrix& m, const char* what);
void require_symmetric(const Matrix& m, const char* what);

// True when a Cholesky factorization succeeds.
bool cholesky_ok(const Matrix& m);

// log|M| for symmetric positive definite M, via Cholesky.
double log_det_spd(const Matrix& m, const char* what = "matrix");

Matrix spd_inverse(const Matrix& m, const char* what = "matrix");

double min_eigenvalue_sym(const Matrix& m);

void symmetrize(Matrix& m);

double soft_threshold(double x, double t);

// Sum of |m_ij| over i != j.
double offdiag_abs_sum(const Matrix& m);

// Largest |a_ij - b_ij|.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace rccm
