#include "mor/model.hpp"

#include <cmath>
#include <limits>

namespace mor {

Parameter::Parameter(std::initializer_list<double> v) : values(static_cast<Index>(v.size())) {
  Index i = 0;
  for (double x : v) values(i++) = x;
}

AffineMatrix::AffineMatrix(Operator constant_term, std::vector<Operator> parametric_terms)
    : constant_(std::move(constant_term)), terms_(std::move(parametric_terms)) {
  for (const auto& t : terms_) {
    if (t.rows() != constant_.rows() || t.cols() != constant_.cols()) {
      throw Error(ErrorCode::kDimensionMismatch, "affine terms must share dimensions");
    }
  }
}

Operator affine_eval(const AffineMatrix& a, const Parameter& mu) {
  const Index d = a.num_parameters();
  if (d == 0) return a.constant_term();
  if (mu.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                "parameter has " + std::to_string(mu.size()) + " entries, model expects " + std::to_string(d));
  }
  if (!mu.values.allFinite()) throw Error(ErrorCode::kInvalidInput, "non-finite parameter");
  std::vector<const Operator*> ops{&a.constant_term()};
  std::vector<double> coeffs{1.0};
  for (Index i = 0; i < d; ++i) {
    ops.push_back(&a.parametric_terms()[static_cast<std::size_t>(i)]);
    coeffs.push_back(mu[i]);
  }
  return lincomb(ops, coeffs);
}

LtiModel::LtiModel(Operator e, AffineMatrix a, DenseMatrix b, DenseMatrix c,
                   InnerProduct energy_product)
    : e_(std::move(e)), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)),
      energy_(std::move(energy_product)) {
  const Index n = e_.rows();
  if (e_.cols() != n || a_.rows() != n || a_.cols() != n || b_.rows() != n || c_.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "LtiModel: inconsistent system dimensions");
  }
  if (!energy_.is_identity() && energy_.matrix().rows() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "LtiModel: energy product dimension");
  }
  if (!b_.allFinite() || !c_.allFinite() || !e_.all_finite()) {
    throw Error(ErrorCode::kInvalidInput, "LtiModel: non-finite system matrices");
  }
}

LtiModel LtiModel::at(const Parameter& mu) const {
  return LtiModel(e_, AffineMatrix(a_at(mu)), b_, c_, energy_);
}

LtiModel project(const LtiModel& fom, const BasisPair& basis) {
  const Index n = fom.order();
  if (basis.v.rows() != n || basis.w.rows() != n || basis.v.cols() != basis.w.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "project: basis does not match model order");
  }
  const DenseMatrix& v = basis.v;
  const DenseMatrix& w = basis.w;
  const Index r = v.cols();

  DenseMatrix e_hat = fom.e().project(w, v);
  if (r > 0) {
    Eigen::PartialPivLU<DenseMatrix> lu(e_hat);
    if (lu_is_singular(lu)) {
      throw Error(ErrorCode::kDegenerateProjection, "project: W^T E V is singular");
    }
  }
  Operator a0(DenseMatrix(fom.a().constant_term().project(w, v)));
  std::vector<Operator> terms;
  for (const auto& t : fom.a().parametric_terms()) terms.emplace_back(DenseMatrix(t.project(w, v)));

  DenseMatrix gram = fom.energy_product().gram(v, v);
  gram = 0.5 * (gram + gram.transpose()).eval();
  return LtiModel(Operator(std::move(e_hat)), AffineMatrix(std::move(a0), std::move(terms)),
                  w.transpose() * fom.b(), fom.c() * v, InnerProduct(Operator(std::move(gram))));
}

DenseMatrix sample_input(const InputSignal& u, Index num_inputs, Index steps) {
  if (const auto* step = std::get_if<StepInput>(&u)) {
    return DenseMatrix::Constant(num_inputs, steps + 1, step->amplitude);
  }
  if (const auto* sampled = std::get_if<SampledInput>(&u)) {
    if (sampled->values.rows() != num_inputs || sampled->values.cols() != steps + 1) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "sampled input must be num_inputs x (steps + 1)");
    }
    return sampled->values;
  }
  return DenseMatrix::Zero(num_inputs, steps + 1);
}

Trajectory simulate(const LtiModel& model, const Parameter& mu, const InputSignal& u,
                    double t_final, Index steps) {
  if (!(t_final > 0)) throw Error(ErrorCode::kInvalidInput, "simulate: t_final must be positive");
  if (steps < 1) throw Error(ErrorCode::kInvalidInput, "simulate: need at least one step");
  const Index n = model.order();
  const double dt = t_final / static_cast<double>(steps);
  const DenseMatrix inputs = sample_input(u, model.num_inputs(), steps);

  Trajectory traj;
  traj.times.resize(static_cast<std::size_t>(steps + 1));
  for (Index k = 0; k <= steps; ++k) traj.times[static_cast<std::size_t>(k)] = t_final * static_cast<double>(k) / static_cast<double>(steps);
  traj.states = DenseMatrix::Zero(n, steps + 1);

  const bool zero_input = std::holds_alternative<ZeroInput>(u) || inputs.isZero(0.0);
  if (!zero_input && n > 0) {
    const Operator a = model.a_at(mu);
    Factorization<double> lu(model.e(), 1.0, a, -dt);
    const DenseMatrix forcing = dt * model.b() * inputs;
    DenseMatrix x = DenseMatrix::Zero(n, 1);
    for (Index k = 0; k < steps; ++k) {
      DenseMatrix rhs = model.e().apply<double>(x) + forcing.col(k + 1);
      x = lu.solve(rhs);
      traj.states.col(k + 1) = x;
    }
  }
  traj.outputs = model.c() * traj.states;
  return traj;
}

ComplexMatrix transfer(const LtiModel& model, const Parameter& mu, Complex s) {
  const Operator a = model.a_at(mu);
  try {
    if (s.imag() == 0.0) {
      Factorization<double> lu(model.e(), s.real(), a, -1.0);
      return (model.c() * lu.solve(model.b())).cast<Complex>();
    }
    Factorization<Complex> lu(model.e(), s, a, Complex(-1.0));
    return model.c().cast<Complex>() * lu.solve(model.b().cast<Complex>());
  } catch (const Error& err) {
    if (err.code() == ErrorCode::kSingularSystem) {
      throw Error(ErrorCode::kPoleHit, "transfer: s is a pole of the model");
    }
    throw;
  }
}

LtiModel error_system(const LtiModel& fom, const LtiModel& rom, const Parameter& mu) {
  if (fom.num_inputs() != rom.num_inputs() || fom.num_outputs() != rom.num_outputs()) {
    throw Error(ErrorCode::kDimensionMismatch, "error_system: input/output dimensions differ");
  }
  const Index n = fom.order();
  const Index r = rom.order();
  Operator e = block_diagonal({fom.e(), rom.e()});
  Operator a = block_diagonal({fom.a_at(mu), rom.a_at(mu)});
  DenseMatrix b(n + r, fom.num_inputs());
  b << fom.b(), rom.b();
  DenseMatrix c(fom.num_outputs(), n + r);
  c << fom.c(), -rom.c();
  return LtiModel(std::move(e), AffineMatrix(std::move(a)), std::move(b), std::move(c));
}

ComplexVector poles(const LtiModel& model, const Parameter& mu) {
  if (model.order() > kSmallProblemLimit) {
    throw Error(ErrorCode::kUnsupportedSize, "poles: model order exceeds the dense limit");
  }
  return generalized_eigenvalues(model.a_at(mu).to_dense(), model.e().to_dense());
}

}  // namespace mor
