#include "mor/operator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseLU>

namespace mor {

Operator::Operator() : rep_(DenseMatrix(0, 0)) {}

Operator::Operator(DenseMatrix m)
    : rows_(m.rows()), cols_(m.cols()) {
  rep_ = std::move(m);
}

Operator::Operator(SparseMatrix m) : rows_(m.rows()), cols_(m.cols()) {
  m.makeCompressed();
  rep_ = std::move(m);
}

Operator::Operator(BlockDiagonal b) {
  for (const auto& block : b.blocks) {
    rows_ += block.rows();
    cols_ += block.cols();
  }
  rep_ = std::move(b);
}

Operator Operator::zero(Index rows, Index cols) {
  return Operator(SparseMatrix(rows, cols));
}

Operator Operator::identity(Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return Operator(std::move(id));
}

Operator::Kind Operator::kind() const {
  return static_cast<Kind>(rep_.index());
}

const DenseMatrix& Operator::dense() const {
  if (!is_dense()) throw Error(ErrorCode::kInvalidInput, "operator is not dense");
  return std::get<DenseMatrix>(rep_);
}

const SparseMatrix& Operator::sparse() const {
  if (!is_sparse()) throw Error(ErrorCode::kInvalidInput, "operator is not sparse");
  return std::get<SparseMatrix>(rep_);
}

const BlockDiagonal& Operator::blocks() const {
  if (!is_block_diagonal()) {
    throw Error(ErrorCode::kInvalidInput, "operator is not block-diagonal");
  }
  return std::get<BlockDiagonal>(rep_);
}

DenseMatrix Operator::to_dense() const {
  switch (kind()) {
    case Kind::kDense:
      return dense();
    case Kind::kSparse:
      return DenseMatrix(sparse());
    case Kind::kBlockDiagonal: {
      DenseMatrix out = DenseMatrix::Zero(rows_, cols_);
      Index r = 0;
      Index c = 0;
      for (const auto& b : blocks().blocks) {
        out.block(r, c, b.rows(), b.cols()) = b.to_dense();
        r += b.rows();
        c += b.cols();
      }
      return out;
    }
  }
  return {};
}

SparseMatrix Operator::to_sparse() const {
  switch (kind()) {
    case Kind::kDense:
      return dense().sparseView(0.0, 0.0);
    case Kind::kSparse:
      return sparse();
    case Kind::kBlockDiagonal: {
      std::vector<Eigen::Triplet<double>> triplets;
      Index r = 0;
      Index c = 0;
      for (const auto& b : blocks().blocks) {
        const SparseMatrix s = b.to_sparse();
        for (Index i = 0; i < s.outerSize(); ++i) {
          for (SparseMatrix::InnerIterator it(s, i); it; ++it) {
            triplets.emplace_back(r + it.row(), c + it.col(), it.value());
          }
        }
        r += b.rows();
        c += b.cols();
      }
      SparseMatrix out(rows_, cols_);
      out.setFromTriplets(triplets.begin(), triplets.end());
      return out;
    }
  }
  return {};
}

DenseMatrix Operator::project(const DenseMatrix& w, const DenseMatrix& v) const {
  if (w.rows() != rows_ || v.rows() != cols_) {
    throw Error(ErrorCode::kDimensionMismatch, "operator project");
  }
  return w.transpose() * apply<double>(v);
}

Operator Operator::transpose() const {
  switch (kind()) {
    case Kind::kDense:
      return Operator(DenseMatrix(dense().transpose()));
    case Kind::kSparse:
      return Operator(SparseMatrix(sparse().transpose()));
    case Kind::kBlockDiagonal: {
      BlockDiagonal t;
      for (const auto& b : blocks().blocks) t.blocks.push_back(b.transpose());
      return Operator(std::move(t));
    }
  }
  return {};
}

bool Operator::all_finite() const {
  switch (kind()) {
    case Kind::kDense:
      return dense().allFinite();
    case Kind::kSparse: {
      const auto& s = sparse();
      return Eigen::Map<const DenseVector>(s.valuePtr(), s.nonZeros()).allFinite();
    }
    case Kind::kBlockDiagonal:
      for (const auto& b : blocks().blocks) {
        if (!b.all_finite()) return false;
      }
      return true;
  }
  return false;
}

double Operator::frobenius_norm() const {
  switch (kind()) {
    case Kind::kDense:
      return dense().norm();
    case Kind::kSparse:
      return sparse().norm();
    case Kind::kBlockDiagonal: {
      double sq = 0.0;
      for (const auto& b : blocks().blocks) {
        const double nb = b.frobenius_norm();
        sq += nb * nb;
      }
      return std::sqrt(sq);
    }
  }
  return 0.0;
}

bool Operator::is_symmetric(double rtol) const {
  if (rows_ != cols_) return false;
  const double scale = frobenius_norm();
  switch (kind()) {
    case Kind::kDense:
      return (dense() - dense().transpose()).norm() <= rtol * scale;
    case Kind::kSparse: {
      const SparseMatrix t = sparse().transpose();
      return (sparse() - t).norm() <= rtol * scale;
    }
    case Kind::kBlockDiagonal:
      for (const auto& b : blocks().blocks) {
        if (!b.is_symmetric(rtol)) return false;
      }
      return true;
  }
  return false;
}

namespace {

bool same_block_structure(std::span<const Operator* const> ops) {
  const auto& ref = ops.front()->blocks().blocks;
  for (const auto* op : ops) {
    if (!op->is_block_diagonal()) return false;
    const auto& bl = op->blocks().blocks;
    if (bl.size() != ref.size()) return false;
    for (std::size_t i = 0; i < bl.size(); ++i) {
      if (bl[i].rows() != ref[i].rows() || bl[i].cols() != ref[i].cols()) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

Operator lincomb(std::span<const Operator* const> ops,
                 std::span<const double> coeffs) {
  if (ops.empty() || ops.size() != coeffs.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "lincomb needs one coefficient per operator");
  }
  const Index rows = ops.front()->rows();
  const Index cols = ops.front()->cols();
  bool all_dense = true;
  bool all_blocks = true;
  for (const auto* op : ops) {
    if (op->rows() != rows || op->cols() != cols) {
      throw Error(ErrorCode::kDimensionMismatch, "lincomb operand shapes differ");
    }
    all_dense = all_dense && op->is_dense();
    all_blocks = all_blocks && op->is_block_diagonal();
  }
  if (all_dense) {
    DenseMatrix out = DenseMatrix::Zero(rows, cols);
    for (std::size_t i = 0; i < ops.size(); ++i) out += coeffs[i] * ops[i]->dense();
    return Operator(std::move(out));
  }
  if (all_blocks && same_block_structure(ops)) {
    const std::size_t nblocks = ops.front()->blocks().blocks.size();
    BlockDiagonal out;
    for (std::size_t b = 0; b < nblocks; ++b) {
      std::vector<const Operator*> parts;
      for (const auto* op : ops) parts.push_back(&op->blocks().blocks[b]);
      out.blocks.push_back(lincomb(parts, coeffs));
    }
    return Operator(std::move(out));
  }
  SparseMatrix out(rows, cols);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i]->is_sparse()) {
      out += coeffs[i] * ops[i]->sparse();
    } else {
      out += coeffs[i] * ops[i]->to_sparse();
    }
  }
  return Operator(std::move(out));
}

Operator block_diagonal(std::vector<Operator> blocks) {
  return Operator(BlockDiagonal{std::move(blocks)});
}

// ---------------------------------------------------------------------------

template <typename Scalar>
struct Factorization<Scalar>::Impl {
  using SparseCol = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;
  std::unique_ptr<Eigen::SparseLU<SparseCol, Eigen::COLAMDOrdering<int>>> sparse;
  std::unique_ptr<Eigen::PartialPivLU<Matrix<Scalar>>> dense;
  std::vector<Factorization<Scalar>> blocks;
};

namespace {

template <typename Scalar>
Matrix<Scalar> dense_combination(const Operator& e, Scalar alpha,
                                 const Operator* a, Scalar beta) {
  Matrix<Scalar> m = alpha * e.to_dense().template cast<Scalar>();
  if (a != nullptr) m += beta * a->to_dense().template cast<Scalar>();
  return m;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar, Eigen::ColMajor> sparse_combination(
    const Operator& e, Scalar alpha, const Operator* a, Scalar beta) {
  using SparseCol = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;
  SparseCol m = (e.is_sparse() ? e.sparse() : e.to_sparse()).template cast<Scalar>();
  m *= alpha;
  if (a != nullptr) {
    SparseCol sa = (a->is_sparse() ? a->sparse() : a->to_sparse()).template cast<Scalar>();
    m += beta * sa;
  }
  m.makeCompressed();
  return m;
}

bool blocks_match(const Operator& e, const Operator& a) {
  if (!e.is_block_diagonal() || !a.is_block_diagonal()) return false;
  const auto& be = e.blocks().blocks;
  const auto& ba = a.blocks().blocks;
  if (be.size() != ba.size()) return false;
  for (std::size_t i = 0; i < be.size(); ++i) {
    if (be[i].rows() != ba[i].rows() || be[i].cols() != ba[i].cols()) return false;
  }
  return true;
}

}  // namespace

template <typename Scalar>
Factorization<Scalar>::Factorization(const Operator& op)
    : Factorization(op, Scalar(1), Operator::zero(op.rows(), op.cols()), Scalar(0)) {}

template <typename Scalar>
Factorization<Scalar>::Factorization(const Operator& e, Scalar alpha,
                                     const Operator& a, Scalar beta)
    : impl_(std::make_unique<Impl>()), size_(e.rows()) {
  if (e.rows() != e.cols() || a.rows() != e.rows() || a.cols() != e.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "factorization needs square operators of equal size");
  }
  const bool a_is_zero = a.is_sparse() && a.sparse().nonZeros() == 0;
  if (e.is_block_diagonal() && (a_is_zero || blocks_match(e, a))) {
    const auto& be = e.blocks().blocks;
    for (std::size_t i = 0; i < be.size(); ++i) {
      if (a_is_zero) {
        impl_->blocks.emplace_back(be[i], alpha,
                                   Operator::zero(be[i].rows(), be[i].cols()), beta);
      } else {
        impl_->blocks.emplace_back(be[i], alpha, a.blocks().blocks[i], beta);
      }
    }
    return;
  }
  const Operator* a_ptr = a_is_zero ? nullptr : &a;
  if (e.is_dense() && (a_ptr == nullptr || a.is_dense())) {
    Matrix<Scalar> m = dense_combination<Scalar>(e, alpha, a_ptr, beta);
    if (!m.allFinite()) {
      throw Error(ErrorCode::kInvalidInput, "non-finite matrix in factorization");
    }
    impl_->dense = std::make_unique<Eigen::PartialPivLU<Matrix<Scalar>>>(m);
    if (size_ > 0 && lu_is_singular(*impl_->dense)) {
      throw Error(ErrorCode::kSingularSystem, "dense factorization is numerically singular");
    }
    return;
  }
  auto m = sparse_combination<Scalar>(e, alpha, a_ptr, beta);
  impl_->sparse = std::make_unique<
      Eigen::SparseLU<typename Impl::SparseCol, Eigen::COLAMDOrdering<int>>>();
  impl_->sparse->analyzePattern(m);
  impl_->sparse->factorize(m);
  if (impl_->sparse->info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularSystem,
                "sparse factorization failed: " + impl_->sparse->lastErrorMessage());
  }
}

template <typename Scalar>
Factorization<Scalar>::~Factorization() = default;
template <typename Scalar>
Factorization<Scalar>::Factorization(Factorization&&) noexcept = default;
template <typename Scalar>
Factorization<Scalar>& Factorization<Scalar>::operator=(Factorization&&) noexcept = default;

template <typename Scalar>
Matrix<Scalar> Factorization<Scalar>::solve(const Matrix<Scalar>& rhs) const {
  if (rhs.rows() != size_) throw Error(ErrorCode::kDimensionMismatch, "solve rhs");
  if (impl_->dense) return impl_->dense->solve(rhs);
  if (impl_->sparse) return impl_->sparse->solve(rhs);
  Matrix<Scalar> x(size_, rhs.cols());
  Index offset = 0;
  for (const auto& b : impl_->blocks) {
    x.middleRows(offset, b.size()) =
        b.solve(Matrix<Scalar>(rhs.middleRows(offset, b.size())));
    offset += b.size();
  }
  return x;
}

template <typename Scalar>
Matrix<Scalar> Factorization<Scalar>::solve_transpose(const Matrix<Scalar>& rhs) const {
  if (rhs.rows() != size_) throw Error(ErrorCode::kDimensionMismatch, "solve_transpose rhs");
  if (impl_->dense) return impl_->dense->transpose().solve(rhs);
  if (impl_->sparse) return impl_->sparse->transpose().solve(rhs);
  Matrix<Scalar> x(size_, rhs.cols());
  Index offset = 0;
  for (const auto& b : impl_->blocks) {
    x.middleRows(offset, b.size()) =
        b.solve_transpose(Matrix<Scalar>(rhs.middleRows(offset, b.size())));
    offset += b.size();
  }
  return x;
}

template class Factorization<double>;
template class Factorization<Complex>;

}  // namespace mor
