#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "mor/checks.hpp"
#include "mor/errors.hpp"
#include "mor/linalg.hpp"
#include "mor/mateq.hpp"
#include "mor/metrics.hpp"
#include "mor/reductors.hpp"
#include "mor/thermalblock.hpp"

namespace mor::checks {

namespace {

using experiments::RunResult;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

template <class F>
CheckResult timed(int id, const std::string& name, F&& body) {
  CheckResult r;
  r.id = id;
  r.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

DenseMatrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  }
  return m;
}

DenseMatrix stable_matrix(Index n, std::mt19937_64& rng) {
  const DenseMatrix a = gaussian(n, n, rng);
  const double shift = Eigen::EigenSolver<DenseMatrix>(a, false).eigenvalues().real().maxCoeff();
  return a - (shift + 0.5) * DenseMatrix::Identity(n, n);
}

LtiModel dense_model(const DenseMatrix& a, const DenseMatrix& e, const DenseMatrix& b, const DenseMatrix& c) {
  return LtiModel(Operator(e), AffineMatrix(Operator(a)), b, c);
}

double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool all_stable(const LtiModel& rom, const Parameter& mu) {
  const ComplexVector p = poles(rom, mu);
  for (Index i = 0; i < p.size(); ++i) {
    if (!(p(i).real() < 0.0)) return false;
  }
  return true;
}

/// H(s) and H'(s) = -C (sE - A)^{-1} E (sE - A)^{-1} B from dense matrices.
std::pair<Complex, Complex> siso_value_and_slope(const LtiModel& m, const Parameter& mu, Complex s) {
  const ComplexMatrix e = m.e().to_dense().cast<Complex>();
  const ComplexMatrix a = m.a_at(mu).to_dense().cast<Complex>();
  const Eigen::PartialPivLU<ComplexMatrix> lu(s * e - a);
  const ComplexMatrix x = lu.solve(m.b().cast<Complex>());
  const ComplexMatrix c = m.c().cast<Complex>();
  const Complex value = (c * x)(0, 0);
  const Complex slope = -(c * lu.solve(e * x))(0, 0);
  return {value, slope};
}

double relative_gap(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

Index thermal_grid_default() { return thermalblock::Spec{}.grid_points_per_side; }

void check_tally(const RunResult& run, const std::vector<std::string>& methods, Index& checked, Index& unstable,
                 std::string& where) {
  for (const auto& name : methods) {
    const auto it = run.stability.find(name);
    if (it == run.stability.end()) continue;
    checked += it->second.checked;
    unstable += it->second.unstable;
    for (const auto& f : it->second.failures) where += name + " " + f + "; ";
  }
}

}  // namespace

CheckResult lyapunov_oracle() {
  return timed(1, "Lyapunov oracle equivalence", [](CheckResult& r) {
    std::mt19937_64 rng(1001);
    double worst_gap = 0.0, worst_res = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Index n = 2 + 2 * t;
      const DenseMatrix a = stable_matrix(n, rng);
      DenseMatrix e = DenseMatrix::Identity(n, n);
      if (t % 2 == 1) e += 0.2 * gaussian(n, n, rng) / std::sqrt(static_cast<double>(n));
      const DenseMatrix b = gaussian(n, 1 + t % 3, rng);
      const DenseMatrix p = solve_lyapunov_dense(a, e, b);
      const DenseMatrix pk = solve_lyapunov_kronecker(a, e, b);
      worst_gap = std::max(worst_gap, max_abs(p - pk) / max_abs(pk));
      worst_res = std::max(worst_res, lyapunov_residual(a, e, p, b));
    }
    r.passed = worst_gap <= 1e-9 && worst_res <= 1e-10;
    r.detail = "20 systems n=2..40, max entrywise gap " + sci(worst_gap) + " (<= 1e-9), max residual " +
               sci(worst_res) + " (<= 1e-10)";
  });
}

CheckResult adi_equivalence() {
  return timed(2, "LR-ADI equivalence", [](CheckResult& r) {
    thermalblock::Spec spec;
    spec.grid_points_per_side = 8;
    const LtiModel fom = thermalblock::build(spec);
    const Parameter mu = Parameter::ones(fom.num_parameters());
    const Operator a = fom.a_at(mu);
    const LowRankFactor z = lr_adi(a, fom.e(), fom.b(), AdiOptions{});
    const DenseMatrix p = solve_lyapunov_dense(a.to_dense(), fom.e().to_dense(), fom.b());
    const double gap = (z.z * z.z.transpose() - p).norm() / p.norm();
    r.passed = gap <= 1e-6 && z.converged;
    r.detail = "g=8: ||ZZ^T - P||_F/||P||_F = " + sci(gap) + " (<= 1e-6), " + std::to_string(z.z.cols()) +
               " columns, " + std::to_string(z.iterations) + " iterations";
  });
}

CheckResult riccati_scalar() {
  return timed(3, "Riccati scalar truth", [](CheckResult& r) {
    const DenseMatrix one = DenseMatrix::Constant(1, 1, 1.0);
    const RiccatiSolution s = solve_riccati_dense(-one, one, one, one);
    const double scalar_gap = std::abs(s.p(0, 0) - (std::sqrt(2.0) - 1.0));

    std::mt19937_64 rng(1003);
    const Index n = 8;
    const DenseMatrix a = stable_matrix(n, rng);
    const DenseMatrix e = DenseMatrix::Identity(n, n) + 0.2 * gaussian(n, n, rng) / std::sqrt(double(n));
    const DenseMatrix b = gaussian(n, 2, rng);
    const RiccatiSolution zero_c = solve_riccati_dense(a, e, b, DenseMatrix::Zero(1, n));
    const DenseMatrix lyap = solve_lyapunov_dense(a, e, b);
    const double lyap_gap = (zero_c.p - lyap).norm() / lyap.norm();
    const RiccatiSolution scalar_zero = solve_riccati_dense(-one, one, one, DenseMatrix::Zero(1, 1));
    const double scalar_zero_gap = std::abs(scalar_zero.p(0, 0) - 0.5);
    r.passed = scalar_gap <= 1e-10 && lyap_gap <= 1e-12 && scalar_zero_gap <= 1e-12;
    r.detail = "|P - (sqrt2-1)| = " + sci(scalar_gap) + " (<= 1e-10); C=0 vs Lyapunov: n=8 " + sci(lyap_gap) +
               ", scalar " + sci(scalar_zero_gap) + " (<= 1e-12)";
  });
}

CheckResult h2_quadrature() {
  return timed(4, "H2 trace vs quadrature", [](CheckResult& r) {
    std::vector<LtiModel> models;
    const DenseMatrix one = DenseMatrix::Constant(1, 1, 1.0);
    models.push_back(dense_model(-one, one, one, one));
    DenseMatrix a2 = DenseMatrix::Zero(2, 2);
    a2.diagonal() << -1.0, -2.0;
    models.push_back(dense_model(a2, DenseMatrix::Identity(2, 2), DenseMatrix::Ones(2, 1), DenseMatrix::Ones(1, 2)));
    std::mt19937_64 rng(1005);
    for (Index n : {4, 7, 10}) {
      const DenseMatrix a = stable_matrix(n, rng);
      const DenseMatrix e = DenseMatrix::Identity(n, n) + 0.1 * gaussian(n, n, rng) / std::sqrt(double(n));
      models.push_back(dense_model(a, e, gaussian(n, 2, rng), gaussian(2, n, rng)));
    }
    const Parameter mu;
    double worst_quad = 0.0, worst_side = 0.0, analytic_gap = 0.0;
    const double analytic[] = {std::sqrt(0.5), std::sqrt(17.0 / 12.0)};
    for (std::size_t k = 0; k < models.size(); ++k) {
      const LtiModel& m = models[k];
      const ComplexVector p = poles(m, mu);
      const double slow = p.real().cwiseAbs().minCoeff();
      const double fast = p.cwiseAbs().maxCoeff();
      const double t_final = 40.0 / slow;
      const Index steps = static_cast<Index>(std::ceil(4.0 * t_final * fast)) + 1000;
      const double oracle = impulse_quadrature_oracle(m, mu, t_final, steps);
      const double ctrl = h2_norm(m, mu, SolverKind::kDense, GramianSide::kControllability).value;
      const double obs = h2_norm(m, mu, SolverKind::kDense, GramianSide::kObservability).value;
      worst_quad = std::max(worst_quad, std::abs(ctrl - oracle) / oracle);
      worst_side = std::max(worst_side, std::abs(ctrl - obs) / ctrl);
      if (k < 2) analytic_gap = std::max(analytic_gap, std::abs(ctrl - analytic[k]) / analytic[k]);
    }
    r.passed = worst_quad <= 1e-4 && worst_side <= 1e-6 && analytic_gap <= 1e-6;
    r.detail = "5 systems: trace vs quadrature " + sci(worst_quad) + " (<= 1e-4), controllability vs observability " +
               sci(worst_side) + " (<= 1e-6), analytic cases " + sci(analytic_gap);
  });
}

CheckResult bt_bound(BtSweep* sweep) {
  return timed(5, "BT sampled-Hinf bound", [sweep](CheckResult& r) {
    const thermalblock::Spec spec;
    const LtiModel fom = thermalblock::build(spec);
    const Parameter mu = Parameter::ones(fom.num_parameters());
    const BalancingFactors factors = bt_factors(fom, mu, SolverKind::kDense);
    const DenseMatrix coupling = factors.zq.transpose() * fom.e().apply<double>(factors.zp);
    const DenseVector sigma = Eigen::JacobiSVD<DenseMatrix>(coupling).singularValues();
    // Values below the numerical-rank threshold are not resolved by the
    // factors; bound each of them by the threshold.
    const double resolution = 1e-14 * sigma(0);
    std::vector<double> hsv(sigma.data(), sigma.data() + sigma.size());
    hsv.resize(static_cast<std::size_t>(fom.order()), 0.0);
    for (double& h : hsv) h = std::max(h, resolution);
    const std::vector<double> grid = log_frequency_grid(1e-4, 1e4, 200);
    bool ok = true;
    Index unstable = 0, roms = 0;
    double worst_ratio = 0.0;
    std::ostringstream violations;
    for (Index order = 2; order <= 20; order += 2) {
      const ReductionResult red = balanced_truncation(fom, mu, order, factors);
      const Index kept = red.diagnostics.order;
      const double err = sampled_hinf_error(fom, red.rom, mu, grid);
      const double bound = bt_error_bound(hsv, kept);
      worst_ratio = std::max(worst_ratio, err / bound);
      if (!(err <= bound)) {
        ok = false;
        violations << " r=" << order << " (kept " << kept << "): " << sci(err) << " > " << sci(bound) << ";";
      }
      ++roms;
      if (!all_stable(red.rom, mu)) ++unstable;
    }
    if (sweep != nullptr) {
      sweep->roms = roms;
      sweep->unstable = unstable;
      sweep->detail = "BT r=2..20 at g=" + std::to_string(spec.grid_points_per_side);
    }
    r.passed = ok;
    r.detail = "g=" + std::to_string(spec.grid_points_per_side) + ", r=2..20, 200-point grid, unresolved HSVs bounded by " + sci(resolution) + ", max error/bound " +
               sci(worst_ratio) + violations.str();
  });
}

CheckResult stability(const BtSweep& sweep, const std::vector<const RunResult*>& runs) {
  return timed(6, "Stability preservation", [&](CheckResult& r) {
    Index checked = 0, unstable = 0;
    std::string where;
    std::string scope;
    if (!runs.empty()) {
      for (const RunResult* run : runs) {
        check_tally(*run, {"POD", "OSIRKA", "OSIRKA_local", "OSIRKA_global", "BT_global", "BT_matched", "RB"},
                    checked, unstable, where);
      }
      scope = "Galerkin ROMs from the experiment runs";
    } else {
      const thermalblock::Spec spec;
      const LtiModel fom = thermalblock::build(spec);
      const Parameter ones = Parameter::ones(fom.num_parameters());
      for (Index order = 2; order <= 20; order += 2) {
        const ReductionResult pod = pod_reduce(fom, ones, StepInput{1.0}, 1.0, 100, order);
        const ReductionResult os = os_irka(fom, ones, order);
        for (const LtiModel* rom : {&pod.rom, &os.rom}) {
          ++checked;
          if (!all_stable(*rom, ones)) {
            ++unstable;
            where += "r=" + std::to_string(order) + "; ";
          }
        }
      }
      experiments::SamplingSpec sampling{3, 3, -6.0, 2.0};
      const std::vector<Parameter> params = experiments::four_param_values(sampling, fom.num_parameters(), 7);
      std::vector<BasisPair> os_locals, bt_locals;
      for (Index i = 0; i < sampling.training_count; ++i) {
        os_locals.push_back(os_irka(fom, params[i], 10).basis);
        bt_locals.push_back(bt(fom, params[i], 10, SolverKind::kDense).basis);
      }
      const InnerProduct& m = fom.energy_product();
      const LtiModel os_global = project(fom, global_basis(os_locals, m, 1e-7, fom.order()));
      const LtiModel bt_global = project(fom, global_basis(bt_locals, m, 1e-7, fom.order()));
      for (const Parameter& mu : params) {
        for (const LtiModel* rom : {&os_global, &bt_global}) {
          ++checked;
          if (!all_stable(*rom, mu)) {
            ++unstable;
            where += "global; ";
          }
        }
      }
      scope = "POD and OS-IRKA r=2..20 plus global bases at 6 parameters";
    }
    r.passed = sweep.roms > 0 && sweep.unstable == 0 && checked > 0 && unstable == 0;
    r.detail = sweep.detail + ": " + std::to_string(sweep.roms - sweep.unstable) + "/" + std::to_string(sweep.roms) +
               " stable; " + scope + ": " + std::to_string(checked - unstable) + "/" + std::to_string(checked) +
               " stable" + (where.empty() ? "" : " (unstable: " + where + ")");
  });
}

CheckResult irka_certificate() {
  return timed(7, "IRKA optimality certificate", [](CheckResult& r) {
    std::mt19937_64 rng(1007);
    Index certified = 0, attempts = 0;
    double worst_value = 0.0, worst_slope = 0.0;
    const Parameter mu;
    while (certified < 5 && attempts < 40) {
      ++attempts;
      const Index n = 20 + 6 * (attempts % 6);
      DenseMatrix a;
      if (attempts % 2 == 0) {
        const DenseMatrix g = gaussian(n, n, rng);
        a = -(g * g.transpose() / static_cast<double>(n) + 0.1 * DenseMatrix::Identity(n, n));
      } else {
        a = stable_matrix(n, rng);
      }
      const LtiModel fom = dense_model(a, DenseMatrix::Identity(n, n), gaussian(n, 1, rng), gaussian(1, n, rng));
      std::optional<ReductionResult> red;
      try {
        red.emplace(irka(fom, mu, 4));
      } catch (const Error&) {
        continue;
      }
      if (!red->diagnostics.converged) continue;
      ++certified;
      for (const Complex& s : red->diagnostics.shifts) {
        const auto [h, dh] = siso_value_and_slope(fom, mu, s);
        const auto [hr, dhr] = siso_value_and_slope(red->rom, mu, s);
        worst_value = std::max(worst_value, relative_gap(h, hr));
        worst_slope = std::max(worst_slope, relative_gap(dh, dhr));
      }
    }
    thermalblock::Spec spec;
    const LtiModel block = thermalblock::build(spec);
    const Parameter ones = Parameter::ones(block.num_parameters());
    bool real_shifts = true;
    std::string os_detail;
    for (Index order : {4, 10}) {
      try {
        const ReductionResult os = os_irka(block, ones, order);
        for (const Complex& s : os.diagnostics.shifts) real_shifts = real_shifts && s.imag() == 0.0 && s.real() > 0.0;
        os_detail += " r=" + std::to_string(order) + ": " + std::to_string(os.diagnostics.iterations) + " it";
      } catch (const Error& e) {
        real_shifts = false;
        os_detail += std::string(" r=") + std::to_string(order) + ": " + e.what();
      }
    }
    r.passed = certified == 5 && worst_value <= 1e-5 && worst_slope <= 1e-5 && real_shifts;
    r.detail = std::to_string(certified) + " converged SISO systems (" + std::to_string(attempts) +
               " tried): value gap " + sci(worst_value) + ", slope gap " + sci(worst_slope) +
               " (<= 1e-5); OS-IRKA on g=" + std::to_string(thermal_grid_default()) + " shifts real at every iterate" +
               (real_shifts ? "" : " VIOLATED") + ";" + os_detail;
  });
}

CheckResult greedy_degeneracy() {
  return timed(8, "POD-Greedy degeneracy", [](CheckResult& r) {
    thermalblock::Spec spec;
    spec.grid_points_per_side = 8;
    const LtiModel fom = thermalblock::build(spec);
    const Parameter mu{0.5, 2.0, 1.0, 0.1};
    const Index iterations = 6;
    GreedyOptions options;
    options.max_basis = iterations;
    const GreedyResult g = pod_greedy(fom, {mu}, StepInput{1.0}, 1.0, 100, options);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.trace.bases.size(); ++k) {
      const ReductionResult pod = pod_reduce(fom, mu, StepInput{1.0}, 1.0, 100, static_cast<Index>(k + 1));
      worst = std::max(worst, subspace_distance(g.trace.bases[k], pod.basis.v));
    }
    r.passed = static_cast<Index>(g.trace.bases.size()) == iterations && worst <= 1e-8;
    r.detail = std::to_string(g.trace.bases.size()) + " iterations, max sine of principal angle " + sci(worst) +
               " (<= 1e-8)";
  });
}

CheckResult nonparam_shape(const RunResult& nonparam) {
  CheckResult r = timed(9, "Figure shape, non-parametric", [&](CheckResult& out) {
    Index found = 0, passed = 0;
    for (const auto& c : nonparam.soft_checks) {
      if (c.name.find("r=10") == std::string::npos) continue;
      ++found;
      if (c.passed) ++passed;
      out.detail += c.name + " [" + (c.passed ? "pass" : "warn") + "] " + c.detail + "; ";
    }
    out.passed = found == 2 && passed == 2;
    if (found != 2) out.detail += "expected 2 soft checks at r=10, found " + std::to_string(found);
  });
  r.soft = true;
  return r;
}

CheckResult parametric_shape(const RunResult& one_param, const RunResult& four_param) {
  CheckResult r = timed(10, "Figure shape, parametric", [&](CheckResult& out) {
    Index found = 0, passed = 0;
    for (const RunResult* run : {&one_param, &four_param}) {
      for (const auto& c : run->soft_checks) {
        if (c.name.find("OS-IRKA") == std::string::npos) continue;
        ++found;
        if (c.passed) ++passed;
        out.detail += c.name + " [" + (c.passed ? "pass" : "warn") + "] " + c.detail + "; ";
      }
    }
    out.passed = found == 2 && passed == 2;
  });
  r.soft = true;
  return r;
}

CheckResult determinism(const std::filesystem::path& scratch) {
  return timed(11, "Determinism", [&](CheckResult& r) {
    experiments::Config cfg;
    cfg.fom.grid_points_per_side = 12;
    cfg.orders = {2, 4, 6};
    cfg.local_order = 4;
    cfg.four_param = {4, 4, -6.0, 2.0};
    cfg.seed = 2024;
    cfg.cache_dir = scratch / "cache";
    std::filesystem::remove_all(cfg.cache_dir);
    auto csv_bytes = [](const RunResult& run) {
      std::string bytes;
      for (const auto& [stem, table] : run.tables) bytes += stem + "\n" + experiments::format_csv(table);
      return bytes;
    };
    std::vector<std::string> outputs;
    for (unsigned threads : {1u, 3u}) {
      cfg.threads = threads;
      cfg.output_dir = scratch / ("run" + std::to_string(threads));
      outputs.push_back(csv_bytes(experiments::run_nonparametric(cfg)) + csv_bytes(experiments::run_four_param(cfg)));
    }
    r.passed = outputs[0] == outputs[1] && !outputs[0].empty();
    r.detail = "nonparam + four-param at g=12, seed 2024, 1 vs 3 threads, cold vs cached FOM: " +
               std::string(r.passed ? "identical" : "DIFFERENT") + " (" + std::to_string(outputs[0].size()) +
               " bytes)";
  });
}

CheckResult runtime(double seconds, double limit_seconds) {
  CheckResult r;
  r.id = 12;
  r.name = "End-to-end runtime";
  r.passed = seconds < limit_seconds;
  char buf[160];
  std::snprintf(buf, sizeof buf, "full default suite %.1f s (limit %.0f s) on %u hardware threads", seconds,
                limit_seconds, std::max(1u, std::thread::hardware_concurrency()));
  r.detail = buf;
  r.seconds = seconds;
  return r;
}

std::vector<CheckResult> oracle_suite() {
  std::vector<CheckResult> out;
  out.push_back(lyapunov_oracle());
  out.push_back(adi_equivalence());
  out.push_back(riccati_scalar());
  out.push_back(h2_quadrature());
  BtSweep sweep;
  out.push_back(bt_bound(&sweep));
  out.push_back(stability(sweep, {}));
  out.push_back(irka_certificate());
  out.push_back(greedy_degeneracy());
  return out;
}

std::string format_line(const CheckResult& r) {
  const char* verdict = r.passed ? "PASS" : (r.soft ? "WARN" : "FAIL");
  char timing[32];
  std::snprintf(timing, sizeof timing, " (%.1f s)", r.seconds);
  return std::string("[") + verdict + "] " + std::to_string(r.id) + " " + r.name + ": " + r.detail + timing;
}

}  // namespace mor::checks
