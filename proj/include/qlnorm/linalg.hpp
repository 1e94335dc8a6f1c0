#pragma once

#include "qlnorm/model.hpp"

namespace qlnorm {

// Solves T X = B in place for a tridiagonal T (LAPACK gtsv, partial pivoting).
// Returns false when T is singular.
bool solve_tridiagonal(Tridiag T, Eigen::MatrixXd& B);

}  // namespace qlnorm
