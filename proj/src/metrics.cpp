#include "mor/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace mor {

namespace {

H2Report make_report(double raw, GramianSide side, SolverKind solver, double residual) {
  H2Report r;
  r.raw_trace = raw;
  r.value = std::sqrt(std::max(raw, 0.0));
  r.side = side;
  r.solver = solver;
  r.residual = residual;
  return r;
}

void require_stable_rom(const LtiModel& rom, const Parameter& mu) {
  if (rom.order() == 0) return;
  const ComplexVector p = poles(rom, mu);
  for (Index i = 0; i < p.size(); ++i) {
    if (!(p(i).real() < 0.0)) throw Error(ErrorCode::kUnstable, "reduced model has a pole with Re >= 0");
  }
}

LowRankFactor converged_adi(const Operator& a, const Operator& e, const DenseMatrix& b, const AdiOptions& adi) {
  LowRankFactor f = lr_adi(a, e, b, adi);
  if (!f.converged) throw Error(ErrorCode::kNotConverged, "low-rank ADI did not reach its tolerance");
  return f;
}

double last_residual(const LowRankFactor& f) { return f.residuals.empty() ? 0.0 : f.residuals.back(); }

}  // namespace

H2Report h2_norm(const LtiModel& model, const Parameter& mu, SolverKind solver, GramianSide side,
                 const AdiOptions& adi) {
  const Operator a = model.a_at(mu);
  const bool ctrl = side == GramianSide::kControllability;
  if (solver == SolverKind::kDense) {
    const DenseMatrix ad = a.to_dense();
    const DenseMatrix ed = model.e().to_dense();
    const DenseLyapunovSolver lyap(ad, ed);
    if (ctrl) {
      const DenseMatrix p = lyap.controllability(model.b());
      return make_report((model.c() * p * model.c().transpose()).trace(), side, solver,
                         lyapunov_residual(ad, ed, p, model.b()));
    }
    const DenseMatrix q = lyap.observability(model.c());
    return make_report((model.b().transpose() * q * model.b()).trace(), side, solver,
                       lyapunov_residual(ad.transpose(), ed.transpose(), q, model.c().transpose()));
  }
  if (ctrl) {
    const LowRankFactor f = converged_adi(a, model.e(), model.b(), adi);
    return make_report((model.c() * f.z).squaredNorm(), side, solver, last_residual(f));
  }
  const LowRankFactor f = converged_adi(a.transpose(), model.e().transpose(), model.c().transpose(), adi);
  return make_report((model.b().transpose() * f.z).squaredNorm(), side, solver, last_residual(f));
}

namespace {

// Gauss-Legendre rule on [-1, 1] by the Golub-Welsch eigenvalue method.
void gauss_legendre(Index count, DenseVector& nodes, DenseVector& weights) {
  DenseMatrix jacobi = DenseMatrix::Zero(count, count);
  for (Index k = 1; k < count; ++k) {
    const double kk = static_cast<double>(k);
    jacobi(k, k - 1) = jacobi(k - 1, k) = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(jacobi);
  nodes = es.eigenvalues();
  weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
}

struct FrequencyRule {
  std::vector<double> omega;
  std::vector<double> weight;
};

FrequencyRule frequency_rule(const Operator& a, const Operator& e, const H2ErrorOptions& options) {
  if (options.panels_per_decade < 1 || options.nodes_per_panel < 1) {
    throw Error(ErrorCode::kInvalidInput, "h2 error: quadrature needs positive panel and node counts");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const Complex& z : ritz_values(a, e, std::min<Index>(40, a.rows()))) {
    const double m = std::abs(z);
    if (m > 0.0 && std::isfinite(m)) {
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
  }
  if (!(hi > 0.0)) lo = hi = 1.0;
  const double w_lo = 1e-3 * lo;
  const double w_hi = 1e3 * hi;
  const double decades = std::log10(w_hi / w_lo);
  const Index panels = std::max<Index>(1, static_cast<Index>(std::ceil(decades * options.panels_per_decade)));
  const double width = std::log(w_hi / w_lo) / static_cast<double>(panels);
  DenseVector nodes;
  DenseVector weights;
  gauss_legendre(options.nodes_per_panel, nodes, weights);

  FrequencyRule rule;
  // int_0^{w_lo} f ~ f(w_lo) w_lo and int_{w_hi}^inf f ~ f(w_hi) w_hi, f ~ 1/w^2
  rule.omega.push_back(w_lo);
  rule.weight.push_back(w_lo);
  for (Index p = 0; p < panels; ++p) {
    const double mid = std::log(w_lo) + (static_cast<double>(p) + 0.5) * width;
    for (Index j = 0; j < nodes.size(); ++j) {
      const double w = std::exp(mid + 0.5 * width * nodes(j));
      rule.omega.push_back(w);
      rule.weight.push_back(0.5 * width * weights(j) * w);
    }
  }
  rule.omega.push_back(w_hi);
  rule.weight.push_back(w_hi);
  return rule;
}

double pi() { return std::acos(-1.0); }

// Frequency response of a small model through a Hessenberg reduction of
// E^{-1} A, so each sample costs O(r^2) instead of a dense LU.
class HessenbergResponse {
 public:
  HessenbergResponse(const LtiModel& model, const Parameter& mu) {
    Eigen::PartialPivLU<DenseMatrix> lu_e(model.e().to_dense());
    const DenseMatrix f = lu_e.solve(model.a_at(mu).to_dense());
    const DenseMatrix b = lu_e.solve(model.b());
    if (!f.allFinite() || !b.allFinite()) throw Error(ErrorCode::kSingularPencil, "h2 error: reduced E is singular");
    Eigen::HessenbergDecomposition<DenseMatrix> hd(f);
    h_ = hd.matrixH();
    const DenseMatrix q = hd.matrixQ();
    b_ = q.transpose() * b;
    c_ = model.c() * q;
  }

  ComplexMatrix at(double omega) const {
    const Index r = h_.rows();
    ComplexMatrix m = -h_.cast<Complex>();
    m.diagonal().array() += Complex(0.0, omega);
    ComplexMatrix x = b_.cast<Complex>();
    for (Index j = 0; j + 1 < r; ++j) {
      if (std::abs(m(j + 1, j)) > std::abs(m(j, j))) {
        m.row(j).segment(j, r - j).swap(m.row(j + 1).segment(j, r - j));
        x.row(j).swap(x.row(j + 1));
      }
      if (m(j, j) == Complex(0.0)) throw Error(ErrorCode::kPoleHit, "h2 error: frequency sample hits a pole");
      const Complex l = m(j + 1, j) / m(j, j);
      m.row(j + 1).segment(j, r - j) -= l * m.row(j).segment(j, r - j);
      x.row(j + 1) -= l * x.row(j);
    }
    if (m(r - 1, r - 1) == Complex(0.0)) throw Error(ErrorCode::kPoleHit, "h2 error: frequency sample hits a pole");
    m.triangularView<Eigen::Upper>().solveInPlace(x);
    return c_.cast<Complex>() * x;
  }

 private:
  DenseMatrix h_;
  DenseMatrix b_;
  DenseMatrix c_;
};

}  // namespace

struct H2ErrorEvaluator::Impl {
  LtiModel fom;
  Parameter mu;
  H2ErrorOptions options;
  Operator a;
  H2Report norm;
  FrequencyRule rule;
  std::vector<ComplexMatrix> samples;  // FOM transfer values on the rule
};

H2ErrorEvaluator::H2ErrorEvaluator(const LtiModel& fom, const Parameter& mu, const H2ErrorOptions& options)
    : impl_(std::make_unique<Impl>(Impl{fom, mu, options, fom.a_at(mu), {}, {}, {}})) {
  Impl& s = *impl_;
  if (options.method == H2ErrorMethod::kGramian) {
    s.norm = h2_norm(fom, mu, options.solver, GramianSide::kControllability, options.adi);
    return;
  }
  s.rule = frequency_rule(s.a, fom.e(), options);
  double sum = 0.0;
  for (std::size_t k = 0; k < s.rule.omega.size(); ++k) {
    s.samples.push_back(transfer(fom, mu, Complex(0.0, s.rule.omega[k])));
    sum += s.rule.weight[k] * s.samples.back().squaredNorm();
  }
  s.norm = make_report(sum / pi(), GramianSide::kControllability, options.solver, 0.0);
  s.norm.frequency_quadrature = true;
}

H2ErrorEvaluator::~H2ErrorEvaluator() = default;
H2ErrorEvaluator::H2ErrorEvaluator(H2ErrorEvaluator&&) noexcept = default;
H2ErrorEvaluator& H2ErrorEvaluator::operator=(H2ErrorEvaluator&&) noexcept = default;

const H2Report& H2ErrorEvaluator::fom_norm() const { return impl_->norm; }

H2Report H2ErrorEvaluator::error(const LtiModel& rom) const {
  const Impl& s = *impl_;
  if (rom.num_inputs() != s.fom.num_inputs() || rom.num_outputs() != s.fom.num_outputs()) {
    throw Error(ErrorCode::kDimensionMismatch, "h2 error: input/output dimensions differ");
  }
  require_stable_rom(rom, s.mu);
  if (rom.order() == 0) return s.norm;

  if (s.options.method == H2ErrorMethod::kFrequency) {
    const HessenbergResponse response(rom, s.mu);
    double sum = 0.0;
    for (std::size_t k = 0; k < s.samples.size(); ++k) {
      const ComplexMatrix diff = s.samples[k] - response.at(s.rule.omega[k]);
      sum += s.rule.weight[k] * diff.squaredNorm();
    }
    H2Report r = make_report(sum / pi(), GramianSide::kControllability, s.options.solver, 0.0);
    r.frequency_quadrature = true;
    return r;
  }
  if (s.options.solver == SolverKind::kLowRank) {
    const LtiModel err = error_system(s.fom, rom, s.mu);
    const LowRankFactor f = converged_adi(err.a().constant_term(), err.e(), err.b(), s.options.adi);
    return make_report((err.c() * f.z).squaredNorm(), GramianSide::kControllability, SolverKind::kLowRank,
                       last_residual(f));
  }
  const DenseMatrix a_r = rom.a_at(s.mu).to_dense();
  const DenseMatrix e_r = rom.e().to_dense();
  const DenseMatrix p_r = DenseLyapunovSolver(a_r, e_r).controllability(rom.b());
  const DenseMatrix x = solve_sylvester_sparse_dense(s.a, s.fom.e(), a_r, e_r, s.fom.b(), rom.b());
  const double cross = ((s.fom.c() * x).array() * rom.c().array()).sum();
  const double reduced = (rom.c() * p_r * rom.c().transpose()).trace();
  return make_report(s.norm.raw_trace - 2.0 * cross + reduced, GramianSide::kControllability, SolverKind::kDense,
                     s.norm.residual);
}

H2Report h2_error(const LtiModel& fom, const LtiModel& rom, const Parameter& mu, SolverKind solver,
                  const AdiOptions& adi) {
  H2ErrorOptions options;
  options.solver = solver;
  options.adi = adi;
  return H2ErrorEvaluator(fom, mu, options).error(rom);
}

std::vector<double> hankel_singular_values(const LtiModel& model, const Parameter& mu, SolverKind solver,
                                           const AdiOptions& adi) {
  const Operator a = model.a_at(mu);
  DenseMatrix zp;
  DenseMatrix zq;
  if (solver == SolverKind::kDense) {
    const DenseLyapunovSolver lyap(a.to_dense(), model.e().to_dense());
    zp = gramian_factor(lyap.controllability(model.b()));
    zq = gramian_factor(lyap.observability(model.c()));
  } else {
    zp = converged_adi(a, model.e(), model.b(), adi).z;
    zq = converged_adi(a.transpose(), model.e().transpose(), model.c().transpose(), adi).z;
  }
  std::vector<double> hsv(static_cast<std::size_t>(model.order()), 0.0);
  if (zp.cols() == 0 || zq.cols() == 0) return hsv;
  const DenseVector sigma =
      Eigen::JacobiSVD<DenseMatrix>(zq.transpose() * model.e().apply<double>(zp)).singularValues();
  const Index count = std::min<Index>(sigma.size(), model.order());
  for (Index i = 0; i < count; ++i) hsv[static_cast<std::size_t>(i)] = sigma(i);
  return hsv;
}

double bt_error_bound(const std::vector<double>& hsv, Index r) {
  double tail = 0.0;
  for (std::size_t k = static_cast<std::size_t>(std::max<Index>(r, 0)); k < hsv.size(); ++k) tail += hsv[k];
  return 2.0 * tail;
}

double impulse_quadrature_oracle(const LtiModel& model, const Parameter& mu, double t_final, Index steps) {
  if (steps < 1 || !(t_final > 0.0)) throw Error(ErrorCode::kInvalidInput, "quadrature: bad time grid");
  if (model.order() > kSmallProblemLimit) {
    throw Error(ErrorCode::kUnsupportedSize, "quadrature: model order exceeds the dense limit");
  }
  const Eigen::PartialPivLU<DenseMatrix> lu_e(model.e().to_dense());
  const DenseMatrix f = lu_e.solve(model.a_at(mu).to_dense());
  const double dt = t_final / static_cast<double>(steps);
  const DenseMatrix step = (dt * f).exp();
  const DenseMatrix& c = model.c();
  DenseMatrix x = lu_e.solve(model.b());

  auto value = [&](const DenseMatrix& state) { return (c * state).squaredNorm(); };
  auto slope = [&](const DenseMatrix& state) {
    return 2.0 * ((c * state).array() * (c * f * state).array()).sum();
  };
  const double start_value = value(x);
  const double start_slope = slope(x);
  double sum = 0.5 * start_value;
  for (Index k = 1; k <= steps; ++k) {
    x = step * x;
    sum += (k == steps ? 0.5 : 1.0) * value(x);
  }
  const double integral = dt * sum - dt * dt / 12.0 * (slope(x) - start_slope);
  return std::sqrt(std::max(integral, 0.0));
}

std::vector<double> log_frequency_grid(double lo, double hi, Index count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw Error(ErrorCode::kInvalidInput, "frequency grid");
  std::vector<double> grid;
  if (count == 1) {
    grid.push_back(std::sqrt(lo * hi));
    return grid;
  }
  const double step = std::log10(hi / lo) / static_cast<double>(count - 1);
  for (Index i = 0; i < count; ++i) grid.push_back(lo * std::pow(10.0, step * static_cast<double>(i)));
  return grid;
}

double sampled_hinf_error(const LtiModel& fom, const LtiModel& rom, const Parameter& mu,
                          const std::vector<double>& frequencies) {
  double worst = 0.0;
  for (double w : frequencies) {
    const Complex s(0.0, w);
    const ComplexMatrix diff = transfer(fom, mu, s) - transfer(rom, mu, s);
    worst = std::max(worst, Eigen::JacobiSVD<ComplexMatrix>(diff).singularValues()(0));
  }
  return worst;
}

double sampled_hinf_norm(const LtiModel& model, const Parameter& mu, const std::vector<double>& frequencies) {
  double worst = 0.0;
  for (double w : frequencies) {
    const ComplexMatrix h = transfer(model, mu, Complex(0.0, w));
    worst = std::max(worst, Eigen::JacobiSVD<ComplexMatrix>(h).singularValues()(0));
  }
  return worst;
}

}  // namespace mor
