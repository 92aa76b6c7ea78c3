#include <algorithm>
#include <cmath>

#include "mor/reductors.hpp"

namespace mor {

namespace {

constexpr double kModeRtol = 1e-12;

DenseMatrix snapshots_without_start(const Trajectory& t) {
  return t.states.rightCols(t.states.cols() - 1);
}

double squared_energy_norms(const InnerProduct& m, const DenseMatrix& d) {
  return (d.array() * m.apply(d).array()).sum();
}

double rom_trajectory_error(const InnerProduct& m, const LtiModel& rom, const DenseMatrix& v,
                            const DenseMatrix& fom_snapshots, const Parameter& mu, const InputSignal& u,
                            double t_final, Index steps) {
  if (v.cols() == 0) return squared_energy_norms(m, fom_snapshots);
  const Trajectory rt = simulate(rom, mu, u, t_final, steps);
  const DenseMatrix diff = fom_snapshots - v * snapshots_without_start(rt);
  return squared_energy_norms(m, diff);
}

double coercivity_constant(const LtiModel& fom, const Parameter& mu) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < mu.size(); ++i) alpha = std::min(alpha, mu[i]);
  if (fom.num_parameters() == 0 || fom.a().constant_term().frobenius_norm() > 0.0) alpha = std::min(alpha, 1.0);
  return alpha;
}

double rom_residual_estimate(const LtiModel& fom, const Factorization<double>& m_lu, const Operator& a,
                             const LtiModel& rom, const DenseMatrix& v, const Parameter& mu,
                             const InputSignal& u, double t_final, Index steps) {
  const double alpha = coercivity_constant(fom, mu);
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::kCoercivityBound, "residual estimator needs strictly positive parameters");
  }
  const double dt = t_final / static_cast<double>(steps);
  const DenseMatrix inputs = sample_input(u, fom.num_inputs(), steps);
  DenseMatrix y = DenseMatrix::Zero(fom.order(), steps + 1);
  if (v.cols() > 0) y = v * simulate(rom, mu, u, t_final, steps).states;
  const DenseMatrix ey = fom.e().apply<double>(y);
  const DenseMatrix ay = a.apply<double>(DenseMatrix(y.rightCols(steps)));
  const DenseMatrix res = ey.rightCols(steps) - ey.leftCols(steps) -
                          dt * (ay + fom.b() * inputs.rightCols(steps));
  const DenseMatrix dual = m_lu.solve(res);
  const double sum = (res.array() * dual.array()).sum();
  return std::max(sum, 0.0) / (dt * alpha * dt * alpha);
}

Factorization<double> energy_factorization(const LtiModel& fom) {
  if (fom.energy_product().is_identity()) return Factorization<double>(Operator::identity(fom.order()));
  return Factorization<double>(fom.energy_product().matrix());
}

}  // namespace

ReductionResult pod_reduce(const LtiModel& fom, const Parameter& mu, const InputSignal& u, double t_final,
                           Index steps, Index r) {
  if (r < 1) throw Error(ErrorCode::kInvalidInput, "pod_reduce: r must be positive");
  const Trajectory traj = simulate(fom, mu, u, t_final, steps);
  const PodModes pod = pod_modes(snapshots_without_start(traj), fom.energy_product(), kModeRtol, r);
  if (pod.modes.cols() == 0) throw Error(ErrorCode::kEmptyBasis, "pod_reduce: snapshot matrix is zero");
  Diagnostics diag;
  diag.method = "POD";
  diag.requested_order = r;
  diag.order = pod.modes.cols();
  diag.singular_values.assign(pod.singular_values.data(), pod.singular_values.data() + pod.singular_values.size());
  if (diag.order < r) {
    diag.notes.push_back("only " + std::to_string(diag.order) + " POD modes available");
  }
  BasisPair basis = BasisPair::galerkin_basis(pod.modes);
  LtiModel rom = project(fom, basis);
  return ReductionResult{std::move(rom), std::move(basis), std::move(diag)};
}

double trajectory_error(const LtiModel& fom, const DenseMatrix& v, const Trajectory& fom_traj,
                        const Parameter& mu, const InputSignal& u, double t_final, Index steps) {
  const LtiModel rom = project(fom, BasisPair::galerkin_basis(v));
  return rom_trajectory_error(fom.energy_product(), rom, v, snapshots_without_start(fom_traj), mu, u, t_final,
                              steps);
}

double residual_estimate(const LtiModel& fom, const DenseMatrix& v, const Parameter& mu,
                         const InputSignal& u, double t_final, Index steps) {
  const LtiModel rom = project(fom, BasisPair::galerkin_basis(v));
  return rom_residual_estimate(fom, energy_factorization(fom), fom.a_at(mu), rom, v, mu, u, t_final, steps);
}

GreedyResult pod_greedy(const LtiModel& fom, const std::vector<Parameter>& training, const InputSignal& u,
                        double t_final, Index steps, const GreedyOptions& options) {
  if (training.empty()) throw Error(ErrorCode::kInvalidInput, "pod_greedy: empty training set");
  if (options.modes_per_iter < 1 || options.max_basis < 0) {
    throw Error(ErrorCode::kInvalidInput, "pod_greedy: modes_per_iter >= 1 and max_basis >= 0 required");
  }
  const bool exact = options.estimator == GreedyEstimator::kTrueError;
  if (!exact) {
    for (const auto& mu : training) {
      if (!(coercivity_constant(fom, mu) > 0.0)) {
        throw Error(ErrorCode::kCoercivityBound, "residual estimator needs strictly positive parameters");
      }
    }
  }
  const InnerProduct& m = fom.energy_product();
  const std::size_t count = training.size();

  std::vector<DenseMatrix> fom_snapshots(count);
  auto snapshots_at = [&](std::size_t i) -> const DenseMatrix& {
    if (fom_snapshots[i].size() == 0) {
      fom_snapshots[i] = snapshots_without_start(simulate(fom, training[i], u, t_final, steps));
    }
    return fom_snapshots[i];
  };
  std::vector<Factorization<double>> m_lu;
  std::vector<Operator> a_at;
  if (!exact) {
    m_lu.push_back(energy_factorization(fom));
    for (const auto& mu : training) a_at.push_back(fom.a_at(mu));
  }

  GreedyTrace trace;
  Diagnostics diag;
  diag.method = "POD-Greedy";
  DenseMatrix v(fom.order(), 0);
  while (true) {
    const LtiModel rom = project(fom, BasisPair::galerkin_basis(v));
    std::size_t worst = 0;
    double worst_value = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double value =
          exact ? rom_trajectory_error(m, rom, v, snapshots_at(i), training[i], u, t_final, steps)
                : rom_residual_estimate(fom, m_lu.front(), a_at[i], rom, v, training[i], u, t_final, steps);
      if (value > worst_value) {
        worst_value = value;
        worst = i;
      }
    }
    trace.max_errors.push_back(worst_value);
    if (worst_value <= options.target || v.cols() >= options.max_basis) break;

    const DenseMatrix& x = snapshots_at(worst);
    const DenseMatrix remainder = v.cols() == 0 ? x : DenseMatrix(x - v * m.gram(v, x));
    const Index wanted = std::min(options.modes_per_iter, options.max_basis - v.cols());
    const PodModes pod = pod_modes(remainder, m, kModeRtol, wanted);
    if (pod.modes.cols() == 0) {
      diag.notes.push_back("selected snapshots already lie in the basis span");
      break;
    }
    DenseMatrix extended(v.rows(), v.cols() + pod.modes.cols());
    extended << v, pod.modes;
    const DenseMatrix next = orthonormalize(extended, m);
    if (next.cols() <= v.cols()) {
      diag.notes.push_back("enrichment did not grow the basis");
      break;
    }
    v = next;
    trace.selected.push_back(static_cast<Index>(worst));
    trace.basis_sizes.push_back(v.cols());
    if (options.record_bases) trace.bases.push_back(v);
    diag.iterations += 1;
  }
  if (v.cols() == 0 && options.target < trace.max_errors.back()) {
    throw Error(ErrorCode::kEmptyBasis, "pod_greedy: no basis vectors could be generated");
  }
  diag.requested_order = options.max_basis;
  diag.order = v.cols();
  diag.converged = trace.max_errors.back() <= options.target;
  BasisPair basis = BasisPair::galerkin_basis(v);
  LtiModel rom = project(fom, basis);
  return GreedyResult{ReductionResult{std::move(rom), std::move(basis), std::move(diag)}, std::move(trace)};
}

}  // namespace mor
