#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "mor/errors.hpp"
#include "mor/types.hpp"

namespace mor {

class Operator;

struct BlockDiagonal {
  std::vector<Operator> blocks;
};

// Representation-agnostic linear operator. Reductors only touch system
// matrices through this interface (apply, project, factorizations), so the
// backing storage can be dense, sparse or block-diagonal.
class Operator {
 public:
  enum class Kind { kDense, kSparse, kBlockDiagonal };

  Operator();
  explicit Operator(DenseMatrix m);
  explicit Operator(SparseMatrix m);
  explicit Operator(BlockDiagonal b);

  static Operator zero(Index rows, Index cols);
  static Operator identity(Index n);

  Kind kind() const;
  bool is_dense() const { return kind() == Kind::kDense; }
  bool is_sparse() const { return kind() == Kind::kSparse; }
  bool is_block_diagonal() const { return kind() == Kind::kBlockDiagonal; }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  const DenseMatrix& dense() const;
  const SparseMatrix& sparse() const;
  const BlockDiagonal& blocks() const;

  DenseMatrix to_dense() const;
  SparseMatrix to_sparse() const;

  // this * x
  template <typename Scalar>
  Matrix<Scalar> apply(const Matrix<Scalar>& x) const;
  // this^T * x
  template <typename Scalar>
  Matrix<Scalar> apply_transpose(const Matrix<Scalar>& x) const;

  // w^T * this * v
  DenseMatrix project(const DenseMatrix& w, const DenseMatrix& v) const;

  Operator transpose() const;

  bool all_finite() const;
  double frobenius_norm() const;
  bool is_symmetric(double rtol) const;

 private:
  std::variant<DenseMatrix, SparseMatrix, BlockDiagonal> rep_;
  Index rows_ = 0;
  Index cols_ = 0;
};

// sum_i coeffs[i] * ops[i]; dense only when every operand is dense,
// block-diagonal when every operand shares one block structure, sparse
// otherwise.
Operator lincomb(std::span<const Operator* const> ops,
                 std::span<const double> coeffs);

Operator block_diagonal(std::vector<Operator> blocks);

/// True when the LU factors are numerically singular (tiny pivot or tiny
/// reciprocal condition estimate).
template <typename Lu>
bool lu_is_singular(const Lu& lu) {
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  if (diag.size() == 0) return false;
  const double largest = diag.maxCoeff();
  if (!(largest > 0) || !(diag.minCoeff() > 64 * Eigen::NumTraits<double>::epsilon() * largest)) {
    return true;
  }
  return !(lu.rcond() > 64 * Eigen::NumTraits<double>::epsilon());
}

// Factorization of alpha * E + beta * A (or of a single operator), kept per
// call so concurrent users never share mutable state.
template <typename Scalar>
class Factorization {
 public:
  explicit Factorization(const Operator& op);
  Factorization(const Operator& e, Scalar alpha, const Operator& a,
                Scalar beta);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  Index size() const { return size_; }

  Matrix<Scalar> solve(const Matrix<Scalar>& rhs) const;
  Matrix<Scalar> solve_transpose(const Matrix<Scalar>& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Index size_ = 0;
};

// Factors s * E - A.
template <typename Scalar>
Factorization<Scalar> shifted_factorization(const Operator& e,
                                            const Operator& a, Scalar s) {
  return Factorization<Scalar>(e, s, a, Scalar(-1));
}

extern template class Factorization<double>;
extern template class Factorization<Complex>;

// ---------------------------------------------------------------------------

template <typename Scalar>
Matrix<Scalar> Operator::apply(const Matrix<Scalar>& x) const {
  if (x.rows() != cols_) {
    throw Error(ErrorCode::kDimensionMismatch, "operator apply");
  }
  switch (kind()) {
    case Kind::kDense:
      return dense().template cast<Scalar>() * x;
    case Kind::kSparse:
      return sparse().template cast<Scalar>() * x;
    case Kind::kBlockDiagonal: {
      Matrix<Scalar> y(rows_, x.cols());
      Index r = 0;
      Index c = 0;
      for (const auto& b : blocks().blocks) {
        y.middleRows(r, b.rows()) =
            b.apply<Scalar>(Matrix<Scalar>(x.middleRows(c, b.cols())));
        r += b.rows();
        c += b.cols();
      }
      return y;
    }
  }
  return {};
}

template <typename Scalar>
Matrix<Scalar> Operator::apply_transpose(const Matrix<Scalar>& x) const {
  if (x.rows() != rows_) {
    throw Error(ErrorCode::kDimensionMismatch, "operator apply_transpose");
  }
  switch (kind()) {
    case Kind::kDense:
      return dense().transpose().template cast<Scalar>() * x;
    case Kind::kSparse:
      return sparse().transpose().template cast<Scalar>() * x;
    case Kind::kBlockDiagonal: {
      Matrix<Scalar> y(cols_, x.cols());
      Index r = 0;
      Index c = 0;
      for (const auto& b : blocks().blocks) {
        y.middleRows(c, b.cols()) = b.apply_transpose<Scalar>(
            Matrix<Scalar>(x.middleRows(r, b.rows())));
        r += b.rows();
        c += b.cols();
      }
      return y;
    }
  }
  return {};
}

}  // namespace mor
