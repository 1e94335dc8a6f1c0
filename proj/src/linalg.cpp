#include "qlnorm/linalg.hpp"

#include <lapacke.h>

namespace qlnorm {

bool solve_tridiagonal(Tridiag T, Eigen::MatrixXd& B) {
  const lapack_int n = static_cast<lapack_int>(T.diag.size());
  const lapack_int nrhs = static_cast<lapack_int>(B.cols());
  if (B.rows() != n) return false;
  const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, nrhs, T.lower.data(), T.diag.data(),
                                        T.upper.data(), B.data(), n);
  return info == 0;
}

}  // namespace qlnorm
