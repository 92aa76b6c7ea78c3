#include "mor/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mor {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(const DenseMatrix& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorCode::kInvalidInput, std::string(what) + ": non-finite entries");
}

}  // namespace

InnerProduct::InnerProduct(Operator m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "inner product matrix must be square");
  }
  if (!m.all_finite()) throw Error(ErrorCode::kInvalidInput, "inner product matrix not finite");
  if (!m.is_symmetric(1e-12)) {
    throw Error(ErrorCode::kInvalidInput, "inner product matrix not symmetric");
  }
  m_ = std::move(m);
}

const Operator& InnerProduct::matrix() const {
  if (!m_) throw Error(ErrorCode::kInvalidInput, "identity inner product has no matrix");
  return *m_;
}

DenseMatrix InnerProduct::apply(const DenseMatrix& x) const {
  if (!m_) return x;
  return m_->apply<double>(x);
}

DenseMatrix InnerProduct::gram(const DenseMatrix& x, const DenseMatrix& y) const {
  return x.transpose() * apply(y);
}

double InnerProduct::norm(const DenseVector& x) const {
  if (!m_) return x.norm();
  const double sq = x.dot(m_->apply<double>(x).col(0));
  return std::sqrt(std::max(sq, 0.0));
}

DenseMatrix orthonormalize(const DenseMatrix& v, const InnerProduct& m, double drop_tol) {
  require_finite(v, "orthonormalize");
  if (!(drop_tol > 0)) throw Error(ErrorCode::kInvalidInput, "orthonormalize: drop_tol must be positive");
  const Index n = v.rows();
  const Index k = v.cols();
  DenseMatrix q(n, k);
  DenseMatrix mq(n, k);  // M * q, so projections need no extra products
  Index kept = 0;
  for (Index j = 0; j < k; ++j) {
    DenseVector x = v.col(j);
    DenseVector mx = m.apply(x);
    const double original = std::sqrt(std::max(x.dot(mx), 0.0));
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < kept; ++i) {
        x -= mq.col(i).dot(x) * q.col(i);
      }
    }
    mx = m.apply(x);
    const double remaining = std::sqrt(std::max(x.dot(mx), 0.0));
    if (remaining <= drop_tol * original) continue;
    q.col(kept) = x / remaining;
    mq.col(kept) = mx / remaining;
    ++kept;
  }
  return q.leftCols(kept);
}

PodModes pod_modes(const DenseMatrix& x, const InnerProduct& m, double rtol, Index max_modes) {
  require_finite(x, "pod_modes");
  if (x.cols() < 1) throw Error(ErrorCode::kInvalidInput, "pod_modes: need at least one snapshot");
  if (!(rtol > 0 && rtol <= 1)) throw Error(ErrorCode::kInvalidInput, "pod_modes: rtol must lie in (0, 1]");
  const Index count = x.cols();

  DenseMatrix gram = m.gram(x, x);
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(gram);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kNotConverged, "pod_modes: eigensolver failed");

  // Ascending from Eigen; flip to descending.
  DenseVector evals = eig.eigenvalues().reverse();
  DenseMatrix evecs = eig.eigenvectors().rowwise().reverse();

  PodModes out;
  out.singular_values = DenseVector::Zero(count);
  const double top = std::max(evals(0), 0.0);
  if (top == 0.0) {
    out.modes = DenseMatrix(x.rows(), 0);
    return out;
  }
  const double zero_level = static_cast<double>(count) * kEps * top;
  for (Index i = 0; i < count; ++i) {
    out.singular_values(i) = evals(i) > zero_level ? std::sqrt(evals(i)) : 0.0;
  }

  Index keep = 0;
  const double sigma_top = out.singular_values(0);
  while (keep < count && keep < max_modes && out.singular_values(keep) > 0.0 &&
         out.singular_values(keep) > rtol * sigma_top) {
    ++keep;
  }

  DenseMatrix modes = x * evecs.leftCols(keep);
  for (Index i = 0; i < keep; ++i) modes.col(i) /= out.singular_values(i);

  // Second Gram-Schmidt pass: the snapshot method loses orthogonality for
  // small singular values. A mode that collapses ends the list.
  DenseMatrix mmodes = m.apply(modes);
  Index good = 0;
  for (Index i = 0; i < keep; ++i) {
    DenseVector col = modes.col(i);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < good; ++j) col -= mmodes.col(j).dot(col) * modes.col(j);
    }
    const DenseVector mcol = m.apply(col);
    const double nrm = std::sqrt(std::max(col.dot(mcol), 0.0));
    if (!(nrm > 0.5)) break;
    modes.col(good) = col / nrm;
    mmodes.col(good) = mcol / nrm;
    ++good;
  }
  out.modes = modes.leftCols(good);
  return out;
}

DenseMatrix rank_truncate(const DenseMatrix& v, double rtol, Index max_rank) {
  require_finite(v, "rank_truncate");
  if (!(rtol >= 0 && rtol <= 1)) throw Error(ErrorCode::kInvalidInput, "rank_truncate: rtol must lie in [0, 1]");
  if (v.cols() == 0 || v.rows() == 0) return DenseMatrix(v.rows(), 0);
  Eigen::BDCSVD<DenseMatrix> svd(v, Eigen::ComputeThinU);
  const DenseVector& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return DenseMatrix(v.rows(), 0);
  Index keep = 0;
  while (keep < sigma.size() && keep < max_rank && sigma(keep) > 0.0 &&
         sigma(keep) > rtol * sigma(0)) {
    ++keep;
  }
  return svd.matrixU().leftCols(keep);
}

namespace {

Eigen::PartialPivLU<DenseMatrix> pencil_lu(const DenseMatrix& a, const DenseMatrix& e, Index size_limit,
                                           const char* who) {
  if (a.rows() != a.cols() || e.rows() != e.cols() || a.rows() != e.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(who) + ": pencil must be square");
  }
  const Index r = a.rows();
  if (r > size_limit) {
    throw Error(ErrorCode::kUnsupportedSize,
                std::string(who) + ": order " + std::to_string(r) + " exceeds limit " + std::to_string(size_limit));
  }
  require_finite(a, who);
  require_finite(e, who);
  Eigen::PartialPivLU<DenseMatrix> lu_e;
  if (r == 0) return lu_e;
  lu_e.compute(e);
  if (lu_is_singular(lu_e)) throw Error(ErrorCode::kSingularPencil, std::string(who) + ": E is singular");
  return lu_e;
}

std::vector<Index> eigenvalue_order(const ComplexVector& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    if (values(i).real() != values(j).real()) return values(i).real() < values(j).real();
    return values(i).imag() < values(j).imag();
  });
  return order;
}

}  // namespace

ComplexVector generalized_eigenvalues(const DenseMatrix& a, const DenseMatrix& e, Index size_limit) {
  const Eigen::PartialPivLU<DenseMatrix> lu_e = pencil_lu(a, e, size_limit, "generalized_eigenvalues");
  if (a.rows() == 0) return ComplexVector();
  Eigen::EigenSolver<DenseMatrix> eig(lu_e.solve(a), false);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotConverged, "generalized_eigenvalues: QR iteration failed");
  }
  const ComplexVector values = eig.eigenvalues();
  const std::vector<Index> order = eigenvalue_order(values);
  ComplexVector out(values.size());
  for (Index k = 0; k < values.size(); ++k) out(k) = values(order[static_cast<std::size_t>(k)]);
  return out;
}

GeneralizedEigen small_generalized_eig(const DenseMatrix& a, const DenseMatrix& e, Index size_limit) {
  const Eigen::PartialPivLU<DenseMatrix> lu_e = pencil_lu(a, e, size_limit, "small_generalized_eig");
  const Index r = a.rows();
  GeneralizedEigen out;
  if (r == 0) return out;
  Eigen::EigenSolver<DenseMatrix> eig(lu_e.solve(a), true);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kNotConverged, "small_generalized_eig: QR iteration failed");

  const ComplexVector values = eig.eigenvalues();
  const ComplexMatrix vectors = eig.eigenvectors();
  const std::vector<Index> order = eigenvalue_order(values);

  out.values.resize(r);
  out.right.resize(r, r);
  for (Index k = 0; k < r; ++k) {
    out.values(k) = values(order[static_cast<std::size_t>(k)]);
    out.right.col(k) = vectors.col(order[static_cast<std::size_t>(k)]).normalized();
  }
  // Rows of X^{-1} E^{-1} are left eigenvectors with left^T E X = I.
  Eigen::PartialPivLU<ComplexMatrix> lu_x(out.right);
  const ComplexMatrix x_inv_t = lu_x.inverse().transpose();
  const DenseMatrix re = x_inv_t.real();
  const DenseMatrix im = x_inv_t.imag();
  const DenseMatrix left_re = lu_e.transpose().solve(re);
  const DenseMatrix left_im = lu_e.transpose().solve(im);
  out.left = left_re.cast<Complex>() + Complex(0, 1) * left_im.cast<Complex>();
  return out;
}

double subspace_distance(const DenseMatrix& a, const DenseMatrix& b) {
  const DenseMatrix qa = orthonormalize(a);
  const DenseMatrix qb = orthonormalize(b);
  if (qa.cols() == 0) return 0.0;
  const DenseMatrix residual_ab = qa - qb * (qb.transpose() * qa);
  const DenseMatrix residual_ba = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<DenseMatrix> sa(residual_ab);
  Eigen::JacobiSVD<DenseMatrix> sb(residual_ba);
  const double da = sa.singularValues().size() ? sa.singularValues()(0) : 0.0;
  const double db = sb.singularValues().size() ? sb.singularValues()(0) : 0.0;
  return std::max(da, db);
}

}  // namespace mor
