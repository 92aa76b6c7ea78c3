#include <cmath>
#include <limits>
#include <vector>

#include "mor/mateq.hpp"

namespace mor {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool nearly_symmetric(const DenseMatrix& m, double rtol) {
  return (m - m.transpose()).norm() <= rtol * m.norm();
}

// Start index of every diagonal block of a quasi-triangular matrix.
std::vector<Index> diagonal_blocks(const DenseMatrix& t) {
  std::vector<Index> starts;
  const Index n = t.rows();
  Index i = 0;
  while (i < n) {
    starts.push_back(i);
    i += (i + 1 < n && t(i + 1, i) != 0.0) ? 2 : 1;
  }
  starts.push_back(n);
  return starts;
}

// T_ii Z + Z S = rhs for blocks of size 1 or 2.
DenseMatrix solve_small_sylvester(const DenseMatrix& t, const DenseMatrix& s, const DenseMatrix& rhs) {
  const Index p = t.rows();
  const Index q = s.rows();
  if (p == 1 && q == 1) return DenseMatrix::Constant(1, 1, rhs(0, 0) / (t(0, 0) + s(0, 0)));
  DenseMatrix k = DenseMatrix::Zero(p * q, p * q);
  for (Index j = 0; j < q; ++j) {
    k.block(j * p, j * p, p, p) += t;
    for (Index l = 0; l < q; ++l) k.block(j * p, l * p, p, p).diagonal().array() += s(l, j);
  }
  const DenseVector vec = Eigen::Map<const DenseVector>(rhs.data(), p * q);
  const DenseVector z = k.fullPivLu().solve(vec);
  return Eigen::Map<const DenseMatrix>(z.data(), p, q);
}

// Bartels-Stewart back substitution for T Y + Y T^T = R with T upper
// quasi-triangular.
DenseMatrix quasi_triangular_lyapunov(const DenseMatrix& t, const DenseMatrix& r) {
  const Index n = t.rows();
  const std::vector<Index> blocks = diagonal_blocks(t);
  const DenseMatrix tt = t.transpose();  // contiguous rows of T
  DenseMatrix y = DenseMatrix::Zero(n, n);
  const auto nblocks = static_cast<Index>(blocks.size()) - 1;
  for (Index jb = nblocks - 1; jb >= 0; --jb) {
    const Index j0 = blocks[static_cast<std::size_t>(jb)];
    const Index sj = blocks[static_cast<std::size_t>(jb + 1)] - j0;
    const Index j1 = j0 + sj;
    DenseMatrix rj = r.middleCols(j0, sj);
    if (j1 < n) rj.noalias() -= y.rightCols(n - j1) * tt.block(j1, j0, n - j1, sj);
    const DenseMatrix s = tt.block(j0, j0, sj, sj);
    for (Index ib = nblocks - 1; ib >= 0; --ib) {
      const Index i0 = blocks[static_cast<std::size_t>(ib)];
      const Index si = blocks[static_cast<std::size_t>(ib + 1)] - i0;
      const Index i1 = i0 + si;
      DenseMatrix rhs = rj.middleRows(i0, si);
      if (i1 < n) rhs.noalias() -= tt.block(i1, i0, n - i1, si).transpose() * y.block(i1, j0, n - i1, sj);
      y.block(i0, j0, si, sj) = solve_small_sylvester(t.block(i0, i0, si, si), s, rhs);
    }
  }
  return y;
}

DenseMatrix reverse_both(const DenseMatrix& m) { return m.reverse(); }

}  // namespace

DenseLyapunovSolver::DenseLyapunovSolver(const DenseMatrix& a, const DenseMatrix& e, Index size_limit) {
  n_ = a.rows();
  if (a.cols() != n_ || e.rows() != n_ || e.cols() != n_) {
    throw Error(ErrorCode::kDimensionMismatch, "lyapunov: A and E must be square of equal size");
  }
  if (n_ > size_limit) {
    throw Error(ErrorCode::kUnsupportedSize, "lyapunov: order " + std::to_string(n_) +
                                                 " exceeds the dense limit " + std::to_string(size_limit));
  }
  if (!a.allFinite() || !e.allFinite()) throw Error(ErrorCode::kInvalidInput, "lyapunov: non-finite input");
  if (n_ == 0) return;
  lu_e_.compute(e);
  if (lu_is_singular(lu_e_)) throw Error(ErrorCode::kSingularPencil, "lyapunov: E is singular");

  if (nearly_symmetric(a, 1e-12) && nearly_symmetric(e, 1e-12)) {
    const DenseMatrix as = 0.5 * (a + a.transpose());
    const DenseMatrix es = 0.5 * (e + e.transpose());
    Eigen::LLT<DenseMatrix> llt(es);
    if (llt.info() == Eigen::Success) {
      // A U = E U diag(lambda), U^T E U = I
      Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> ges(as, es);
      if (ges.info() == Eigen::Success) {
        symmetric_ = true;
        eigenvalues_ = ges.eigenvalues();
        basis_ = ges.eigenvectors();
      }
    }
  }
  if (symmetric_) {
    if (eigenvalues_.maxCoeff() >= 0.0) {
      throw Error(ErrorCode::kUnstable, "lyapunov: pencil has an eigenvalue with Re >= 0");
    }
    return;
  }

  const DenseMatrix f = lu_e_.solve(a);
  Eigen::RealSchur<DenseMatrix> schur(f);
  if (schur.info() != Eigen::Success) throw Error(ErrorCode::kNotConverged, "lyapunov: Schur form failed");
  basis_ = schur.matrixU();
  schur_ = schur.matrixT();
  const std::vector<Index> blocks = diagonal_blocks(schur_);
  for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
    const Index i = blocks[b];
    const double re = blocks[b + 1] - i == 1 ? schur_(i, i) : 0.5 * (schur_(i, i) + schur_(i + 1, i + 1));
    if (!(re < 0.0)) throw Error(ErrorCode::kUnstable, "lyapunov: pencil has an eigenvalue with Re >= 0");
  }
  schur_reversed_ = reverse_both(schur_.transpose());
}

DenseMatrix DenseLyapunovSolver::solve_reduced(const DenseMatrix& g, bool transposed) const {
  if (!transposed) return quasi_triangular_lyapunov(schur_, -g);
  return reverse_both(quasi_triangular_lyapunov(schur_reversed_, -reverse_both(g)));
}

DenseMatrix DenseLyapunovSolver::controllability(const DenseMatrix& b) const {
  if (b.rows() != n_) throw Error(ErrorCode::kDimensionMismatch, "lyapunov: B has wrong row count");
  if (n_ == 0) return DenseMatrix(0, 0);
  DenseMatrix p;
  if (symmetric_) {
    const DenseMatrix ub = basis_.transpose() * b;
    DenseMatrix y = -(ub * ub.transpose());
    for (Index j = 0; j < n_; ++j) {
      for (Index i = 0; i < n_; ++i) y(i, j) /= eigenvalues_(i) + eigenvalues_(j);
    }
    p = basis_ * y * basis_.transpose();
  } else {
    const DenseMatrix ub = basis_.transpose() * lu_e_.solve(b);
    const DenseMatrix y = solve_reduced(ub * ub.transpose(), false);
    p = basis_ * y * basis_.transpose();
  }
  return 0.5 * (p + p.transpose());
}

DenseMatrix DenseLyapunovSolver::observability(const DenseMatrix& c) const {
  if (c.cols() != n_) throw Error(ErrorCode::kDimensionMismatch, "lyapunov: C has wrong column count");
  if (n_ == 0) return DenseMatrix(0, 0);
  DenseMatrix q;
  if (symmetric_) {
    const DenseMatrix cu = c * basis_;
    DenseMatrix y = -(cu.transpose() * cu);
    for (Index j = 0; j < n_; ++j) {
      for (Index i = 0; i < n_; ++i) y(i, j) /= eigenvalues_(i) + eigenvalues_(j);
    }
    q = basis_ * y * basis_.transpose();
  } else {
    const DenseMatrix cu = c * basis_;
    const DenseMatrix y = solve_reduced(cu.transpose() * cu, true);
    const DenseMatrix q_tilde = basis_ * y * basis_.transpose();  // E^T Q E
    const DenseMatrix left = lu_e_.transpose().solve(q_tilde);    // E^{-T} Q~
    const DenseMatrix right = lu_e_.transpose().solve(DenseMatrix(left.transpose()));
    q = right.transpose();
  }
  return 0.5 * (q + q.transpose());
}

DenseMatrix solve_lyapunov_dense(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& b) {
  return DenseLyapunovSolver(a, e).controllability(b);
}

DenseMatrix solve_lyapunov_kronecker(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& b) {
  const Index n = a.rows();
  if (n > 50) throw Error(ErrorCode::kUnsupportedSize, "kronecker lyapunov: order above 50");
  if (a.cols() != n || e.rows() != n || e.cols() != n || b.rows() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "kronecker lyapunov: dimensions");
  }
  // vec(A P E^T) = (E (x) A) vec P, vec(E P A^T) = (A (x) E) vec P
  DenseMatrix k(n * n, n * n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      k.block(i * n, j * n, n, n) = e(i, j) * a + a(i, j) * e;
    }
  }
  const DenseMatrix bbt = b * b.transpose();
  const DenseVector rhs = -Eigen::Map<const DenseVector>(bbt.data(), n * n);
  const DenseVector vec = k.partialPivLu().solve(rhs);
  return Eigen::Map<const DenseMatrix>(vec.data(), n, n);
}

double lyapunov_residual(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& p,
                         const DenseMatrix& b) {
  const DenseMatrix ape = a * p * e.transpose();
  const DenseMatrix bbt = b * b.transpose();
  const double res = (ape + ape.transpose() + bbt).norm();
  const double scale = bbt.norm();
  return scale > 0 ? res / scale : res;
}

DenseMatrix gramian_factor(const DenseMatrix& p) {
  const Index n = p.rows();
  if (p.cols() != n) throw Error(ErrorCode::kDimensionMismatch, "gramian_factor: P must be square");
  if (n == 0) return DenseMatrix(0, 0);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(0.5 * (p + p.transpose()));
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kNotConverged, "gramian_factor: eigensolver failed");
  const DenseVector& lambda = eig.eigenvalues();  // ascending
  const double top = lambda(n - 1);
  if (!(top > 0)) return DenseMatrix(n, 0);
  const double cutoff = static_cast<double>(n) * kEps * top;
  Index keep = 0;
  while (keep < n && lambda(n - 1 - keep) > cutoff) ++keep;
  DenseMatrix z(n, keep);
  for (Index k = 0; k < keep; ++k) z.col(k) = eig.eigenvectors().col(n - 1 - k) * std::sqrt(lambda(n - 1 - k));
  return z;
}

DenseMatrix solve_sylvester_sparse_dense(const Operator& a, const Operator& e, const DenseMatrix& a_r,
                                         const DenseMatrix& e_r, const DenseMatrix& b, const DenseMatrix& b_r) {
  const Index n = a.rows();
  const Index r = a_r.rows();
  if (e.rows() != n || b.rows() != n || e_r.rows() != r || b_r.rows() != r || b.cols() != b_r.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "sylvester: dimensions");
  }
  if (r == 0) return DenseMatrix(n, 0);
  Eigen::PartialPivLU<DenseMatrix> lu_er(e_r);
  if (lu_is_singular(lu_er)) throw Error(ErrorCode::kSingularPencil, "sylvester: reduced E is singular");
  // A X + E X S^T = -B (E_r^{-1} B_r)^T with S = E_r^{-1} A_r = U T U^T.
  Eigen::RealSchur<DenseMatrix> schur(DenseMatrix(lu_er.solve(a_r)));
  if (schur.info() != Eigen::Success) throw Error(ErrorCode::kNotConverged, "sylvester: Schur form failed");
  const DenseMatrix& u = schur.matrixU();
  const DenseMatrix& t = schur.matrixT();
  const DenseMatrix f = b * (u.transpose() * lu_er.solve(b_r)).transpose();  // n x r

  // A Y + E Y T^T = -F, Y = X U; column j couples to columns k >= j.
  DenseMatrix y = DenseMatrix::Zero(n, r);
  const std::vector<Index> blocks = diagonal_blocks(t);
  for (Index jb = static_cast<Index>(blocks.size()) - 2; jb >= 0; --jb) {
    const Index j0 = blocks[static_cast<std::size_t>(jb)];
    const Index sj = blocks[static_cast<std::size_t>(jb + 1)] - j0;
    const Index j1 = j0 + sj;
    DenseMatrix rhs = -f.middleCols(j0, sj);
    if (j1 < r) rhs -= e.apply<double>(DenseMatrix(y.rightCols(r - j1) * t.block(j0, j1, sj, r - j1).transpose()));
    if (sj == 1) {
      Factorization<double> lu(a, 1.0, e, t(j0, j0));
      y.col(j0) = lu.solve(rhs);
      continue;
    }
    // diagonalize the 2x2 block: T_jj^T = Q D Q^{-1}
    const DenseMatrix s = t.block(j0, j0, 2, 2).transpose();
    Eigen::EigenSolver<DenseMatrix> es(s);
    const ComplexMatrix q = es.eigenvectors();
    const ComplexVector d = es.eigenvalues();
    const ComplexMatrix rq = rhs.cast<Complex>() * q;
    ComplexMatrix yq(n, 2);
    for (Index k = 0; k < 2; ++k) {
      Factorization<Complex> lu(a, Complex(1.0), e, d(k));
      yq.col(k) = lu.solve(ComplexMatrix(rq.col(k)));
    }
    y.middleCols(j0, 2) = (yq * q.inverse()).real();
  }
  return y * u.transpose();
}

}  // namespace mor
