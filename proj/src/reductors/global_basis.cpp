#include "mor/reductors.hpp"

namespace mor {

BasisPair global_basis(const std::vector<BasisPair>& locals, const InnerProduct& m, double rtol, Index max_rank) {
  if (locals.empty()) throw Error(ErrorCode::kInvalidInput, "global_basis: no local bases");
  if (max_rank < 0) throw Error(ErrorCode::kInvalidInput, "global_basis: max_rank must be non-negative");
  const Index n = locals.front().v.rows();
  std::vector<DenseMatrix> parts;
  for (const BasisPair& local : locals) {
    if (local.v.rows() != n || (!local.galerkin && local.w.rows() != n)) {
      throw Error(ErrorCode::kDimensionMismatch, "global_basis: local bases differ in state dimension");
    }
    parts.push_back(orthonormalize(local.v, m));
  }
  for (const BasisPair& local : locals) {
    if (!local.galerkin) parts.push_back(orthonormalize(local.w, m));
  }
  Index cols = 0;
  for (const DenseMatrix& p : parts) cols += p.cols();
  DenseMatrix all(n, cols);
  Index offset = 0;
  for (const DenseMatrix& p : parts) {
    all.middleCols(offset, p.cols()) = p;
    offset += p.cols();
  }
  const DenseMatrix q = orthonormalize(all, m);
  const DenseMatrix kept = rank_truncate(m.gram(q, all), rtol, max_rank);
  return BasisPair::galerkin_basis(q * kept);
}

}  // namespace mor
