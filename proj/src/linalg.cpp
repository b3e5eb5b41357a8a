#include "dpt/linalg.hpp"

#include <lapacke.h>

#include <mutex>
#include <string>

#include "dpt/errors.hpp"

extern "C" void openblas_set_num_threads(int);

namespace dpt::linalg {

namespace {

void pin_blas_threads() {
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
}

}  // namespace

SymmetricEigen symmetric_eigen(Eigen::MatrixXd a) {
  if (a.rows() != a.cols()) throw ConfigError("symmetric_eigen: matrix must be square");
  pin_blas_threads();
  const auto n = static_cast<lapack_int>(a.rows());
  SymmetricEigen out;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, out.values.data());
  if (info != 0) throw NumericError("symmetric_eigen: dsyevd failed with info " + std::to_string(info));
  out.vectors = std::move(a);
  return out;
}

SymmetricEigen tridiagonal_eigen(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal) {
  const auto n = static_cast<lapack_int>(diagonal.size());
  if (n > 0 && off_diagonal.size() != n - 1) throw ConfigError("tridiagonal_eigen: off-diagonal length must be n-1");
  pin_blas_threads();
  SymmetricEigen out;
  out.values = diagonal;
  out.vectors.resize(n, n);
  if (n == 0) return out;
  Eigen::VectorXd e = off_diagonal;
  e.conservativeResize(n);  // dstevd uses a length-n workspace for e
  const lapack_int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', n, out.values.data(), e.data(), out.vectors.data(), n);
  if (info != 0) throw NumericError("tridiagonal_eigen: dstevd failed with info " + std::to_string(info));
  return out;
}

}  // namespace dpt::linalg
