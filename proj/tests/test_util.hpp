#pragma once

#include <random>

#include "mor/model.hpp"

namespace mor::test {

inline DenseMatrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  }
  return m;
}

// Random matrix with all eigenvalues in the open left half-plane.
inline DenseMatrix random_stable(Index n, std::mt19937_64& rng) {
  DenseMatrix a = random_matrix(n, n, rng);
  Eigen::EigenSolver<DenseMatrix> es(a);
  const double shift = es.eigenvalues().real().maxCoeff();
  return a - (shift + 0.5) * DenseMatrix::Identity(n, n);
}

inline SparseMatrix tridiagonal_spd(Index n) {
  SparseMatrix m(n, n);
  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, 4.0);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0);
      t.emplace_back(i + 1, i, -1.0);
    }
  }
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

inline LtiModel dense_model(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& b,
                            const DenseMatrix& c) {
  return LtiModel(Operator(e), AffineMatrix(Operator(a)), b, c);
}

inline LtiModel scalar_model(double e, double a, double b, double c) {
  return dense_model(DenseMatrix::Constant(1, 1, a), DenseMatrix::Constant(1, 1, e),
                     DenseMatrix::Constant(1, 1, b), DenseMatrix::Constant(1, 1, c));
}

// E = I, A = diag(-1, -2), B = [1; 1], C = [1, 1].
inline LtiModel diag2_model() {
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a.diagonal() << -1.0, -2.0;
  return dense_model(a, DenseMatrix::Identity(2, 2), DenseMatrix::Ones(2, 1), DenseMatrix::Ones(1, 2));
}

}  // namespace mor::test
