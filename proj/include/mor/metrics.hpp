#pragma once

#include <memory>
#include <vector>

#include "mor/mateq.hpp"
#include "mor/model.hpp"

namespace mor {

enum class GramianSide { kControllability, kObservability };

struct H2Report {
  double value = 0.0;
  bool frequency_quadrature = false;
  /// Trace before clamping; slightly negative values come from round-off.
  double raw_trace = 0.0;
  GramianSide side = GramianSide::kControllability;
  SolverKind solver = SolverKind::kDense;
  /// Relative Lyapunov residual (dense) or final ADI residual (low-rank);
  /// 0 for the frequency method.
  double residual = 0.0;
};

/// sqrt(trace(C P C^T)) or sqrt(trace(B^T Q B)) of the model frozen at mu.
H2Report h2_norm(const LtiModel& model, const Parameter& mu, SolverKind solver,
                 GramianSide side = GramianSide::kControllability, const AdiOptions& adi = {});

enum class H2ErrorMethod { kGramian, kFrequency };

struct H2ErrorOptions {
  H2ErrorMethod method = H2ErrorMethod::kGramian;
  SolverKind solver = SolverKind::kDense;  // Gramian method only
  AdiOptions adi;
  Index panels_per_decade = 3;  // frequency method only
  Index nodes_per_panel = 8;
};

/// H2 norm of the error between a FOM and ROMs at one parameter. FOM data is
/// computed once.
///
/// Gramian, dense: trace(C P C^T) - 2 trace(C X C_r^T) + trace(C_r P_r C_r^T)
/// with the cross Gramian X from a sparse-dense Sylvester solve. The
/// subtraction limits the absolute accuracy to about sqrt(eps) * ||H||.
///
/// Gramian, low-rank: ADI on the block-diagonal error system, accurate to
/// about sqrt(res_tol) * ||H||.
///
/// Frequency: (1/pi) * integral over w > 0 of ||H(iw) - H_r(iw)||_F^2 by
/// Gauss-Legendre panels in log(w) spanning the FOM spectrum (estimated from
/// Ritz values) with three decades of margin, plus end corrections. Transfer
/// values are subtracted pointwise, so the floor is about eps * ||H||.
class H2ErrorEvaluator {
 public:
  H2ErrorEvaluator(const LtiModel& fom, const Parameter& mu, const H2ErrorOptions& options = {});
  ~H2ErrorEvaluator();
  H2ErrorEvaluator(H2ErrorEvaluator&&) noexcept;
  H2ErrorEvaluator& operator=(H2ErrorEvaluator&&) noexcept;

  const H2Report& fom_norm() const;
  /// A parametric ROM is evaluated at the evaluator's mu.
  H2Report error(const LtiModel& rom) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

H2Report h2_error(const LtiModel& fom, const LtiModel& rom, const Parameter& mu, SolverKind solver,
                  const AdiOptions& adi = {});

/// Singular values of Z_Q^T E Z_P, descending, padded with zeros to the model
/// order.
std::vector<double> hankel_singular_values(const LtiModel& model, const Parameter& mu, SolverKind solver,
                                           const AdiOptions& adi = {});

/// 2 * sum of hsv[k] for k >= r.
double bt_error_bound(const std::vector<double>& hsv, Index r);

/// L2 norm of the impulse response C exp(t E^{-1} A) E^{-1} B on [0, t_final]
/// by the trapezoid rule with the first Euler-Maclaurin end correction.
/// Dense matrix exponential; test oracle for small models.
double impulse_quadrature_oracle(const LtiModel& model, const Parameter& mu, double t_final, Index steps);

/// `count` points log-spaced in [lo, hi].
std::vector<double> log_frequency_grid(double lo, double hi, Index count);

/// max over the grid of the spectral norm of H(i w) - H_r(i w).
double sampled_hinf_error(const LtiModel& fom, const LtiModel& rom, const Parameter& mu,
                          const std::vector<double>& frequencies);

/// max over the grid of the spectral norm of H(i w).
double sampled_hinf_norm(const LtiModel& model, const Parameter& mu, const std::vector<double>& frequencies);

}  // namespace mor
