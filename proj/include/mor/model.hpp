#pragma once

#include <initializer_list>
#include <variant>
#include <vector>

#include "mor/linalg.hpp"
#include "mor/operator.hpp"

namespace mor {

struct Parameter {
  DenseVector values;

  Parameter() = default;
  explicit Parameter(DenseVector v) : values(std::move(v)) {}
  Parameter(std::initializer_list<double> v);

  static Parameter ones(Index d) { return Parameter(DenseVector::Ones(d)); }

  Index size() const { return values.size(); }
  double operator[](Index i) const { return values(i); }
};

/// A(mu) = A0 + sum_i mu_i A_i.
class AffineMatrix {
 public:
  AffineMatrix() = default;
  explicit AffineMatrix(Operator constant_term, std::vector<Operator> parametric_terms = {});

  const Operator& constant_term() const { return constant_; }
  const std::vector<Operator>& parametric_terms() const { return terms_; }
  Index num_parameters() const { return static_cast<Index>(terms_.size()); }
  Index rows() const { return constant_.rows(); }
  Index cols() const { return constant_.cols(); }

 private:
  Operator constant_;
  std::vector<Operator> terms_;
};

/// Evaluates A(mu). Non-parametric matrices (d = 0) ignore mu.
Operator affine_eval(const AffineMatrix& a, const Parameter& mu);

/// E x' = A(mu) x + B u, y = C x, x(0) = 0. Immutable after construction.
class LtiModel {
 public:
  LtiModel(Operator e, AffineMatrix a, DenseMatrix b, DenseMatrix c,
           InnerProduct energy_product = {});

  const Operator& e() const { return e_; }
  const AffineMatrix& a() const { return a_; }
  const DenseMatrix& b() const { return b_; }
  const DenseMatrix& c() const { return c_; }
  const InnerProduct& energy_product() const { return energy_; }

  Index order() const { return e_.rows(); }
  Index num_inputs() const { return b_.cols(); }
  Index num_outputs() const { return c_.rows(); }
  Index num_parameters() const { return a_.num_parameters(); }

  Operator a_at(const Parameter& mu) const { return affine_eval(a_, mu); }
  /// Non-parametric copy with A frozen at mu.
  LtiModel at(const Parameter& mu) const;

 private:
  Operator e_;
  AffineMatrix a_;
  DenseMatrix b_;
  DenseMatrix c_;
  InnerProduct energy_;
};

struct BasisPair {
  DenseMatrix v;
  DenseMatrix w;
  bool galerkin = false;

  static BasisPair galerkin_basis(DenseMatrix v) {
    BasisPair p{v, v, true};
    return p;
  }
  static BasisPair petrov_galerkin(DenseMatrix v, DenseMatrix w) {
    return BasisPair{std::move(v), std::move(w), false};
  }
  Index order() const { return v.cols(); }
};

struct ZeroInput {};
struct StepInput {
  double amplitude = 1.0;
};
/// One column per grid point (steps + 1 columns, t = 0 included), one row per
/// input.
struct SampledInput {
  DenseMatrix values;
};
using InputSignal = std::variant<ZeroInput, StepInput, SampledInput>;

struct Trajectory {
  std::vector<double> times;
  DenseMatrix states;   // n x (steps + 1), column 0 is t = 0
  DenseMatrix outputs;  // p x (steps + 1)
};

/// Petrov-Galerkin projection; every affine term is projected separately so
/// the ROM stays parametric. Throws kDegenerateProjection when W^T E V is
/// singular.
LtiModel project(const LtiModel& fom, const BasisPair& basis);

/// Implicit Euler with uniform step t_final / steps. E - dt A(mu) is factored
/// once.
Trajectory simulate(const LtiModel& model, const Parameter& mu, const InputSignal& u,
                    double t_final, Index steps);

/// C (sE - A(mu))^{-1} B.
ComplexMatrix transfer(const LtiModel& model, const Parameter& mu, Complex s);

/// Non-parametric model of order n + r with output y - y_hat.
LtiModel error_system(const LtiModel& fom, const LtiModel& rom, const Parameter& mu);

/// Generalized eigenvalues of (A(mu), E); dense path, order <= kSmallProblemLimit.
ComplexVector poles(const LtiModel& model, const Parameter& mu);

/// Input values at every grid point as an m x (steps + 1) matrix.
DenseMatrix sample_input(const InputSignal& u, Index num_inputs, Index steps);

}  // namespace mor
