#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace mor {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DenseMatrix = Matrix<double>;
using DenseVector = Vector<double>;
using ComplexMatrix = Matrix<Complex>;
using ComplexVector = Vector<Complex>;

// Compressed-row storage: column indices strictly increasing within a row.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Generalized eigenproblems (poles, IRKA pencils) refuse larger inputs.
inline constexpr Index kSmallProblemLimit = 500;
// Dense matrix-equation solvers refuse larger inputs.
inline constexpr Index kDenseSolverLimit = 2500;

}  // namespace mor
