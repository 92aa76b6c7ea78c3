#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mor/mateq.hpp"
#include "mor/model.hpp"

namespace mor {

struct Diagnostics {
  std::string method;
  Index requested_order = 0;
  Index order = 0;
  Index iterations = 0;
  bool converged = true;
  /// POD singular values, Hankel singular values or LQG characteristic
  /// values, descending.
  std::vector<double> singular_values;
  /// 2 * sum of the truncated Hankel singular values (BT only).
  double error_bound = std::numeric_limits<double>::quiet_NaN();
  /// Interpolation points of the final basis (IRKA family).
  std::vector<Complex> shifts;
  /// Tangential directions paired with `shifts` (IRKA family).
  std::vector<ComplexVector> right_tangents;
  std::vector<ComplexVector> left_tangents;
  /// Largest relative shift change per iteration (IRKA family).
  std::vector<double> shift_changes;
  std::vector<std::string> notes;
};

struct ReductionResult {
  LtiModel rom;
  BasisPair basis;
  Diagnostics diagnostics;
};

// --- POD and POD-greedy ----------------------------------------------------

/// Galerkin ROM from the first r energy-product POD modes of the trajectory
/// at mu (t = 0 snapshot excluded). Fewer than r available modes truncate the
/// basis with a note; none at all throws kEmptyBasis.
ReductionResult pod_reduce(const LtiModel& fom, const Parameter& mu, const InputSignal& u, double t_final,
                           Index steps, Index r);

enum class GreedyEstimator { kTrueError, kResidual };

struct GreedyOptions {
  Index modes_per_iter = 1;
  Index max_basis = 30;
  double target = 0.0;
  GreedyEstimator estimator = GreedyEstimator::kTrueError;
  bool record_bases = true;  // fills GreedyTrace::bases
};

struct GreedyTrace {
  std::vector<Index> selected;      // training index picked in each iteration
  std::vector<double> max_errors;   // max surrogate before each enrichment, plus the final one
  std::vector<Index> basis_sizes;   // basis size after each enrichment
  std::vector<DenseMatrix> bases;   // basis after each enrichment
};

struct GreedyResult {
  ReductionResult result;
  GreedyTrace trace;
};

/// Sum over time steps (t = 0 excluded) of squared energy-norm state errors
/// of the Galerkin ROM for basis `v` (M-orthonormal), against a stored FOM
/// trajectory.
double trajectory_error(const LtiModel& fom, const DenseMatrix& v, const Trajectory& fom_traj,
                        const Parameter& mu, const InputSignal& u, double t_final, Index steps);

/// Upper bound for trajectory_error from the implicit-Euler residuals of the
/// ROM trajectory, sum_k ||r_k||^2_{M^{-1}} / (dt * alpha)^2 with alpha =
/// min_i mu_i (and 1 when A0 is nonzero). Assumes every -A_i is positive
/// semidefinite; throws kCoercivityBound when alpha <= 0.
double residual_estimate(const LtiModel& fom, const DenseMatrix& v, const Parameter& mu,
                         const InputSignal& u, double t_final, Index steps);

/// Weak POD-greedy over a training set.
GreedyResult pod_greedy(const LtiModel& fom, const std::vector<Parameter>& training, const InputSignal& u,
                        double t_final, Index steps, const GreedyOptions& options);

// --- balancing ---------------------------------------------------------------

/// Gramian factors P = Zp Zp^T and Q = Zq Zq^T of the model frozen at one
/// parameter, reusable for several truncation orders.
struct BalancingFactors {
  DenseMatrix zp;
  DenseMatrix zq;
  std::string method;
  /// Hankel singular values (BT) rather than LQG characteristic values.
  bool hankel = true;
  Index iterations = 0;
  std::vector<std::string> notes;
};

BalancingFactors bt_factors(const LtiModel& fom, const Parameter& mu, SolverKind solver,
                            const AdiOptions& adi = {});
BalancingFactors lqgbt_factors(const LtiModel& fom, const Parameter& mu);

/// Square-root balanced truncation from precomputed factors.
ReductionResult balanced_truncation(const LtiModel& fom, const Parameter& mu, Index r,
                                    const BalancingFactors& factors);

ReductionResult bt(const LtiModel& fom, const Parameter& mu, Index r, SolverKind solver,
                   const AdiOptions& adi = {});

/// LQG balanced truncation with dense Newton-Kleinman Riccati solutions.
ReductionResult lqgbt(const LtiModel& fom, const Parameter& mu, Index r);

// --- interpolation -------------------------------------------------------------

enum class IrkaInit { kSpectrumEstimate, kExplicitShifts };

struct IrkaOptions {
  Index max_iter = 100;
  double conv_tol = 1e-4;
  IrkaInit init = IrkaInit::kSpectrumEstimate;
  /// Interpolation points for kExplicitShifts (Re > 0, conjugate-closed).
  std::vector<Complex> initial_shifts;
  Index ritz_steps = 40;
};

/// Tangential IRKA. Interpolation points live in the right half-plane as
/// mirrored ROM poles.
ReductionResult irka(const LtiModel& fom, const Parameter& mu, Index r, const IrkaOptions& options = {});

/// One-sided IRKA (W = V). On a symmetric-definite model every projected pole
/// must be real, otherwise kInternalConsistency is thrown.
ReductionResult os_irka(const LtiModel& fom, const Parameter& mu, Index r, const IrkaOptions& options = {});

// --- parametric --------------------------------------------------------------

/// Galerkin basis spanning every local V (and W for Petrov-Galerkin pairs),
/// orthonormal in m and truncated at singular values <= rtol * sigma_max of
/// the concatenated (per-local orthonormalized) bases.
BasisPair global_basis(const std::vector<BasisPair>& locals, const InnerProduct& m, double rtol,
                       Index max_rank);

}  // namespace mor
