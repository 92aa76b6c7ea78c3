#pragma once

#include <optional>

#include "mor/operator.hpp"
#include "mor/types.hpp"

namespace mor {

/// Inner product on R^n: either the Euclidean one or x^T M y for a symmetric
/// positive-definite M. Positive-definiteness is the caller's promise;
/// symmetry is checked on construction.
class InnerProduct {
 public:
  InnerProduct() = default;
  explicit InnerProduct(Operator m);

  static InnerProduct identity() { return {}; }

  bool is_identity() const { return !m_.has_value(); }
  const Operator& matrix() const;

  DenseMatrix apply(const DenseMatrix& x) const;
  DenseMatrix gram(const DenseMatrix& x, const DenseMatrix& y) const;
  double norm(const DenseVector& x) const;

 private:
  std::optional<Operator> m_;
};

/// Two-pass modified Gram-Schmidt in the product `m`. Columns whose norm after
/// projection falls below drop_tol times their original norm are dropped.
DenseMatrix orthonormalize(const DenseMatrix& v, const InnerProduct& m = {},
                           double drop_tol = 1e-12);

struct PodModes {
  DenseMatrix modes;
  DenseVector singular_values;  // all N of them, descending
};

/// Weighted POD by the method of snapshots (eigendecomposition of X^T M X).
/// Singular values whose square sits below N * eps of the largest are
/// reported as exact zeros.
PodModes pod_modes(const DenseMatrix& x, const InnerProduct& m, double rtol,
                   Index max_modes);

/// Leading left singular vectors of `v` with sigma_i > rtol * sigma_max,
/// at most max_rank of them.
DenseMatrix rank_truncate(const DenseMatrix& v, double rtol, Index max_rank);

struct GeneralizedEigen {
  ComplexVector values;
  ComplexMatrix right;  // A x = lambda E x, unit 2-norm columns
  ComplexMatrix left;   // y^T A = lambda y^T E, scaled so left^T E right = I
};

/// Eigen-decomposition of the pencil (A, E), sorted by real part then
/// imaginary part. Conjugate pairs end up adjacent.
GeneralizedEigen small_generalized_eig(const DenseMatrix& a, const DenseMatrix& e,
                                       Index size_limit = kSmallProblemLimit);

/// Eigenvalues of the pencil (A, E) only, in the same order as
/// small_generalized_eig.
ComplexVector generalized_eigenvalues(const DenseMatrix& a, const DenseMatrix& e,
                                      Index size_limit = kSmallProblemLimit);

/// Sine of the largest principal angle between span(a) and span(b)
/// (Euclidean product).
double subspace_distance(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace mor
