#pragma once

#include <string>
#include <vector>

#include "mor/operator.hpp"

namespace mor {

/// P = Z Z^T.
struct LowRankFactor {
  DenseMatrix z;
  bool converged = true;
  Index iterations = 0;
  /// Relative residual ||W_k||_2^2 / ||B||_2^2 after every ADI step.
  std::vector<double> residuals;
};

/// ADI shifts, Re < 0, closed under conjugation (pairs adjacent, positive
/// imaginary part first).
struct ShiftSet {
  std::vector<Complex> shifts;
  std::string note;  // non-empty when a fallback was taken
};

enum class SolverKind { kDense, kLowRank };

inline const char* to_string(SolverKind kind) {
  return kind == SolverKind::kDense ? "dense" : "lowrank";
}

struct AdiOptions {
  Index num_shifts = 20;
  Index subspace_dim = 40;
  double res_tol = 1e-9;
  Index max_iter = 500;
};

/// Dense solver for the generalized Lyapunov equations
///   A P E^T + E P A^T + B B^T = 0   (controllability)
///   A^T Q E + E^T Q A + C^T C = 0   (observability)
/// Decomposes E^{-1} A once: a symmetric eigendecomposition when E^{-1} A is
/// symmetric, a real Schur form (Bartels-Stewart) otherwise. Throws kUnstable
/// when an eigenvalue has Re >= 0.
class DenseLyapunovSolver {
 public:
  DenseLyapunovSolver(const DenseMatrix& a, const DenseMatrix& e,
                      Index size_limit = kDenseSolverLimit);

  DenseMatrix controllability(const DenseMatrix& b) const;
  DenseMatrix observability(const DenseMatrix& c) const;

  Index order() const { return n_; }
  bool symmetric_path() const { return symmetric_; }

 private:
  // Solves F X + X F^T = -G for F = E^{-1} A (transposed = false) or
  // F = (E^{-1} A)^T (transposed = true); G symmetric.
  DenseMatrix solve_reduced(const DenseMatrix& g, bool transposed) const;

  Index n_ = 0;
  bool symmetric_ = false;
  Eigen::PartialPivLU<DenseMatrix> lu_e_;
  DenseMatrix basis_;  // eigenvectors or Schur vectors
  DenseVector eigenvalues_;
  DenseMatrix schur_;
  DenseMatrix schur_reversed_;  // J T^T J, for the transposed equation
};

DenseMatrix solve_lyapunov_dense(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& b);

/// Kronecker-vectorized solve of (E (x) A + A (x) E) vec P = -vec(B B^T).
/// Independent reference for small n (<= 50).
DenseMatrix solve_lyapunov_kronecker(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& b);

/// ||A P E^T + E P A^T + B B^T||_F / ||B B^T||_F (absolute when B = 0).
double lyapunov_residual(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& p,
                         const DenseMatrix& b);

/// Z with Z Z^T = P for symmetric PSD P; eigen-directions with eigenvalue at
/// or below n * eps * lambda_max are dropped.
DenseMatrix gramian_factor(const DenseMatrix& p);

struct RiccatiSolution {
  DenseMatrix p;
  Index iterations = 0;
  std::vector<double> residuals;  // relative, one per Newton step
};

/// Stabilizing solution of A P E^T + E P A^T - E P C^T C P E^T + B B^T = 0 by
/// Newton-Kleinman from P = 0. The dual equation is solved by passing
/// (A^T, E^T, C^T, B^T). Throws kNotConverged when the relative residual
/// does not reach 1e-9 within max_iter steps.
RiccatiSolution solve_riccati_dense(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& b,
                                    const DenseMatrix& c, Index max_iter = 50);

double riccati_residual(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& p,
                        const DenseMatrix& b, const DenseMatrix& c);

/// Ritz values of E^{-1} A from `steps` Arnoldi steps seeded with the
/// normalized all-ones vector, together with reciprocals of Ritz values of
/// A^{-1} E from steps / 2 further steps. Duplicates are removed.
std::vector<Complex> ritz_values(const Operator& a, const Operator& e, Index steps);

/// Heuristic ADI shifts from Ritz values (mirrored into the left half-plane)
/// by greedy min-max selection on the ADI rational function.
ShiftSet adi_shifts(const Operator& a, const Operator& e, Index num_shifts, Index subspace_dim);

/// Low-rank ADI for A P E^T + E P A^T + B B^T = 0 with residual factors.
/// Shifts are reused cyclically; a conjugate pair is handled by a single
/// complex solve so Z stays real. Returns converged = false after max_iter
/// steps without reaching res_tol.
LowRankFactor lr_adi(const Operator& a, const Operator& e, const DenseMatrix& b, const ShiftSet& shifts,
                     double res_tol, Index max_iter);

/// adi_shifts followed by lr_adi.
LowRankFactor lr_adi(const Operator& a, const Operator& e, const DenseMatrix& b,
                     const AdiOptions& options = {});

/// X with A X E_r^T + E X A_r^T + B B_r^T = 0, where (A, E) is large and
/// (A_r, E_r) small and dense. One sparse solve per reduced order.
DenseMatrix solve_sylvester_sparse_dense(const Operator& a, const Operator& e, const DenseMatrix& a_r,
                                         const DenseMatrix& e_r, const DenseMatrix& b,
                                         const DenseMatrix& b_r);

}  // namespace mor
