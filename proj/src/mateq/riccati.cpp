#include <cmath>

#include "mor/mateq.hpp"

namespace mor {

namespace {

constexpr double kRiccatiTol = 1e-9;

}  // namespace

double riccati_residual(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& p,
                        const DenseMatrix& b, const DenseMatrix& c) {
  const DenseMatrix ape = a * p * e.transpose();
  const DenseMatrix gain = e * p * c.transpose();
  const DenseMatrix bbt = b * b.transpose();
  const double res = (ape + ape.transpose() - gain * gain.transpose() + bbt).norm();
  const double scale = bbt.norm();
  return scale > 0 ? res / scale : res;
}

RiccatiSolution solve_riccati_dense(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& b,
                                    const DenseMatrix& c, Index max_iter) {
  const Index n = a.rows();
  if (a.cols() != n || e.rows() != n || e.cols() != n || b.rows() != n || c.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "riccati: dimensions");
  }
  if (n > kDenseSolverLimit) throw Error(ErrorCode::kUnsupportedSize, "riccati: order exceeds the dense limit");

  RiccatiSolution out;
  out.p = DenseMatrix::Zero(n, n);
  if (b.squaredNorm() == 0.0) {
    // P = 0 is the stabilizing solution; still reject unstable pencils.
    DenseLyapunovSolver check(a, e);
    out.residuals.push_back(0.0);
    return out;
  }
  DenseMatrix gain = DenseMatrix::Zero(n, c.rows());  // E P C^T
  for (Index k = 0; k < max_iter; ++k) {
    const DenseMatrix closed = a - gain * c;
    DenseMatrix rhs(n, b.cols() + gain.cols());
    rhs << b, gain;
    DenseLyapunovSolver solver(closed, e);
    out.p = solver.controllability(rhs);
    gain = e * out.p * c.transpose();
    out.iterations = k + 1;
    const double res = riccati_residual(a, e, out.p, b, c);
    out.residuals.push_back(res);
    if (res <= kRiccatiTol) return out;
  }
  throw Error(ErrorCode::kNotConverged,
              "riccati: Newton-Kleinman did not converge, last relative residual " +
                  std::to_string(out.residuals.back()));
}

}  // namespace mor
