#pragma once

#include <Eigen/Dense>

namespace dpt::linalg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

/// Dense real-symmetric eigen-decomposition (LAPACK divide and conquer).
/// The BLAS backend is pinned to one thread so results are reproducible.
SymmetricEigen symmetric_eigen(Eigen::MatrixXd a);

/// Symmetric tridiagonal eigen-decomposition from the diagonal and the off-diagonal.
SymmetricEigen tridiagonal_eigen(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal);

}  // namespace dpt::linalg
