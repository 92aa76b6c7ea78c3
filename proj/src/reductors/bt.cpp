#include <algorithm>
#include <cmath>

#include "mor/reductors.hpp"

namespace mor {

namespace {

constexpr double kRankRtol = 1e-14;

ReductionResult square_root_projection(const LtiModel& fom, const Parameter& mu, Index r, const DenseMatrix& zp,
                                       const DenseMatrix& zq, const std::string& method, bool hankel) {
  if (r < 1 || r > fom.order()) {
    throw Error(ErrorCode::kInvalidInput, method + ": order must satisfy 1 <= r <= n");
  }
  if (zp.rows() != fom.order() || zq.rows() != fom.order()) {
    throw Error(ErrorCode::kDimensionMismatch, method + ": Gramian factor rows differ from model order");
  }
  if (zp.cols() == 0 || zq.cols() == 0) {
    throw Error(ErrorCode::kDegenerateGramian, method + ": a Gramian factor is empty");
  }
  const DenseMatrix coupling = zq.transpose() * fom.e().apply<double>(zp);
  const Eigen::JacobiSVD<DenseMatrix> svd(coupling, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const DenseVector& sigma = svd.singularValues();
  if (sigma.size() == 0 || !(sigma(0) > 0.0)) {
    throw Error(ErrorCode::kDegenerateGramian, method + ": product of Gramian factors vanishes");
  }
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > kRankRtol * sigma(0)) ++rank;

  Diagnostics diag;
  diag.method = method;
  diag.requested_order = r;
  diag.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
  const Index order = std::min(r, rank);
  if (order < r) {
    diag.notes.push_back("order reduced from " + std::to_string(r) + " to numerical rank " +
                         std::to_string(order));
  }
  diag.order = order;
  if (hankel) diag.error_bound = 2.0 * sigma.tail(sigma.size() - order).sum();

  const DenseVector scale = sigma.head(order).cwiseSqrt().cwiseInverse();
  DenseMatrix v = zp * svd.matrixV().leftCols(order) * scale.asDiagonal();
  DenseMatrix w = zq * svd.matrixU().leftCols(order) * scale.asDiagonal();
  BasisPair basis = BasisPair::petrov_galerkin(std::move(v), std::move(w));
  LtiModel rom = project(fom.at(mu), basis);
  return ReductionResult{std::move(rom), std::move(basis), std::move(diag)};
}

}  // namespace

BalancingFactors bt_factors(const LtiModel& fom, const Parameter& mu, SolverKind solver, const AdiOptions& adi) {
  const Operator a = fom.a_at(mu);
  const Operator& e = fom.e();
  BalancingFactors f;
  f.method = std::string("BT-") + to_string(solver);
  if (solver == SolverKind::kDense) {
    const DenseLyapunovSolver lyap(a.to_dense(), e.to_dense());
    f.zp = gramian_factor(lyap.controllability(fom.b()));
    f.zq = gramian_factor(lyap.observability(fom.c()));
    return f;
  }
  LowRankFactor p = lr_adi(a, e, fom.b(), adi);
  LowRankFactor q = lr_adi(a.transpose(), e.transpose(), DenseMatrix(fom.c().transpose()), adi);
  if (!p.converged) f.notes.push_back("controllability ADI stopped before tolerance");
  if (!q.converged) f.notes.push_back("observability ADI stopped before tolerance");
  f.iterations = p.iterations + q.iterations;
  f.zp = std::move(p.z);
  f.zq = std::move(q.z);
  return f;
}

BalancingFactors lqgbt_factors(const LtiModel& fom, const Parameter& mu) {
  const DenseMatrix a = fom.a_at(mu).to_dense();
  const DenseMatrix e = fom.e().to_dense();
  const RiccatiSolution p = solve_riccati_dense(a, e, fom.b(), fom.c());
  const RiccatiSolution q = solve_riccati_dense(a.transpose(), e.transpose(), fom.c().transpose(),
                                                fom.b().transpose());
  BalancingFactors f;
  f.method = "LQGBT";
  f.hankel = false;
  f.iterations = p.iterations + q.iterations;
  f.zp = gramian_factor(p.p);
  f.zq = gramian_factor(q.p);
  return f;
}

ReductionResult balanced_truncation(const LtiModel& fom, const Parameter& mu, Index r,
                                    const BalancingFactors& factors) {
  ReductionResult out = square_root_projection(fom, mu, r, factors.zp, factors.zq, factors.method, factors.hankel);
  out.diagnostics.iterations = factors.iterations;
  out.diagnostics.notes.insert(out.diagnostics.notes.end(), factors.notes.begin(), factors.notes.end());
  return out;
}

ReductionResult bt(const LtiModel& fom, const Parameter& mu, Index r, SolverKind solver, const AdiOptions& adi) {
  return balanced_truncation(fom, mu, r, bt_factors(fom, mu, solver, adi));
}

ReductionResult lqgbt(const LtiModel& fom, const Parameter& mu, Index r) {
  return balanced_truncation(fom, mu, r, lqgbt_factors(fom, mu));
}

}  // namespace mor
