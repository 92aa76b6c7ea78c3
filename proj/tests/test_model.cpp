#include <cmath>

#include "doctest.h"
#include "mor/model.hpp"
#include "test_util.hpp"

using namespace mor;
using mor::test::random_matrix;

namespace {

SparseMatrix random_sparse(Index n, std::mt19937_64& rng) {
  return random_matrix(n, n, rng).sparseView(0.0, 0.0);
}

// n = 10, d = 2 model with sparse terms.
LtiModel random_affine_model(std::mt19937_64& rng) {
  const Index n = 10;
  Operator e(SparseMatrix(test::tridiagonal_spd(n)));
  AffineMatrix a(Operator(random_sparse(n, rng)),
                 {Operator(random_sparse(n, rng)), Operator(random_sparse(n, rng))});
  return LtiModel(std::move(e), std::move(a), random_matrix(n, 2, rng), random_matrix(3, n, rng),
                  InnerProduct(Operator(test::tridiagonal_spd(n))));
}

}  // namespace

TEST_CASE("affine_eval") {
  std::mt19937_64 rng(2);
  const LtiModel m = random_affine_model(rng);
  const DenseMatrix a0 = m.a().constant_term().to_dense();
  const DenseMatrix a1 = m.a().parametric_terms()[0].to_dense();
  const DenseMatrix a2 = m.a().parametric_terms()[1].to_dense();

  CHECK((affine_eval(m.a(), Parameter{0.0, 0.0}).to_dense() - a0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((affine_eval(m.a(), Parameter{2.0, 0.0}).to_dense() - (a0 + 2 * a1)).cwiseAbs().maxCoeff() <= 1e-15);

  const Parameter mu{0.3, -1.5};
  const Parameter nu{2.5, 0.25};
  const Parameter sum(DenseVector(mu.values + nu.values));
  const DenseMatrix lhs = affine_eval(m.a(), sum).to_dense() - affine_eval(m.a(), mu).to_dense();
  const DenseMatrix rhs = nu[0] * a1 + nu[1] * a2;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13);

  CHECK_THROWS_AS(affine_eval(m.a(), Parameter{1.0}), Error);
  // d = 0 ignores mu
  const AffineMatrix constant{Operator(DenseMatrix(a0))};
  CHECK(affine_eval(constant, Parameter{5.0, 6.0, 7.0}).to_dense() == a0);
}

TEST_CASE("project with the identity basis reproduces the model") {
  std::mt19937_64 rng(4);
  const LtiModel fom = random_affine_model(rng);
  const LtiModel rom = project(fom, BasisPair::galerkin_basis(DenseMatrix::Identity(10, 10)));
  CHECK(rom.num_parameters() == 2);
  CHECK((rom.e().to_dense() - fom.e().to_dense()).norm() <= 1e-14);
  const Parameter mu{0.7, 1.9};
  CHECK((rom.a_at(mu).to_dense() - fom.a_at(mu).to_dense()).norm() <= 1e-13);
  CHECK(rom.b() == fom.b());
  CHECK(rom.c() == fom.c());
  CHECK((rom.energy_product().matrix().to_dense() - fom.energy_product().matrix().to_dense()).norm() == 0.0);
}

TEST_CASE("project matches triple products and keeps affinity") {
  std::mt19937_64 rng(6);
  const LtiModel fom = random_affine_model(rng);
  const DenseMatrix v = orthonormalize(random_matrix(10, 3, rng));
  const DenseMatrix w = orthonormalize(random_matrix(10, 3, rng));
  const LtiModel rom = project(fom, BasisPair::petrov_galerkin(v, w));
  REQUIRE(rom.order() == 3);
  REQUIRE(rom.num_parameters() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const DenseMatrix direct = w.transpose() * fom.a().parametric_terms()[i].to_dense() * v;
    CHECK((rom.a().parametric_terms()[i].to_dense() - direct).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK((rom.e().to_dense() - w.transpose() * fom.e().to_dense() * v).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((rom.b() - w.transpose() * fom.b()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((rom.c() - fom.c() * v).cwiseAbs().maxCoeff() <= 1e-12);

  for (int trial = 0; trial < 5; ++trial) {
    const Parameter mu(random_matrix(2, 1, rng).col(0));
    const DenseMatrix projected_after = rom.a_at(mu).to_dense();
    const DenseMatrix projected_before = w.transpose() * fom.a_at(mu).to_dense() * v;
    const double scale = projected_before.cwiseAbs().maxCoeff();
    CHECK((projected_after - projected_before).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("project with zero input matrix gives a silent model") {
  std::mt19937_64 rng(8);
  const DenseMatrix a = test::random_stable(6, rng);
  const LtiModel fom = test::dense_model(a, DenseMatrix::Identity(6, 6), DenseMatrix::Zero(6, 1),
                                         random_matrix(2, 6, rng));
  const LtiModel rom = project(fom, BasisPair::galerkin_basis(orthonormalize(random_matrix(6, 3, rng))));
  CHECK(rom.b().isZero(0.0));
  const Trajectory traj = simulate(rom, {}, StepInput{1.0}, 1.0, 10);
  CHECK(traj.outputs.isZero(0.0));
}

TEST_CASE("project reports a singular reduced E") {
  const LtiModel fom = test::diag2_model();
  DenseMatrix v(2, 2);
  v << 1, 1, 0, 0;
  try {
    project(fom, BasisPair::galerkin_basis(v));
    FAIL("expected degenerate projection");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kDegenerateProjection);
  }
}

TEST_CASE("simulate") {
  SUBCASE("zero input") {
    std::mt19937_64 rng(10);
    const LtiModel m = random_affine_model(rng);
    const Trajectory t = simulate(m, Parameter{1.0, 1.0}, ZeroInput{}, 1.0, 5);
    CHECK(t.states.isZero(0.0));
    CHECK(t.times.size() == 6);
    CHECK(t.outputs.cols() == 6);
  }
  SUBCASE("scalar recursion") {
    const LtiModel m = test::scalar_model(1.0, -1.0, 1.0, 1.0);
    const Index steps = 50;
    const double dt = 5.0 / steps;
    const Trajectory t = simulate(m, {}, StepInput{1.0}, 5.0, steps);
    double x = 0.0;
    for (Index k = 1; k <= steps; ++k) {
      x = (x + dt) / (1.0 + dt);
      CHECK(t.states(0, k) == doctest::Approx(x).epsilon(1e-14));
    }
    CHECK(t.times.back() == 5.0);
    const Trajectory long_run = simulate(m, {}, StepInput{1.0}, 50.0, 200);
    CHECK(std::abs(long_run.states(0, 200) - 1.0) <= 1e-8);
  }
  SUBCASE("first-order convergence") {
    // x' = -x + 1, x(0) = 0 -> x(1) = 1 - e^{-1}
    const LtiModel m = test::scalar_model(1.0, -1.0, 1.0, 1.0);
    const double exact = 1.0 - std::exp(-1.0);
    const double err_coarse = std::abs(simulate(m, {}, StepInput{}, 1.0, 100).states(0, 100) - exact);
    const double err_fine = std::abs(simulate(m, {}, StepInput{}, 1.0, 200).states(0, 200) - exact);
    CHECK(err_coarse / err_fine == doctest::Approx(2.0).epsilon(0.2));
  }
  SUBCASE("sampled input must cover the grid") {
    const LtiModel m = test::scalar_model(1.0, -1.0, 1.0, 1.0);
    CHECK_THROWS_AS(simulate(m, {}, SampledInput{DenseMatrix::Ones(1, 4)}, 1.0, 4), Error);
    const Trajectory a = simulate(m, {}, SampledInput{DenseMatrix::Ones(1, 5)}, 1.0, 4);
    const Trajectory b = simulate(m, {}, StepInput{1.0}, 1.0, 4);
    CHECK(a.states == b.states);
  }
  SUBCASE("bad grid") {
    const LtiModel m = test::scalar_model(1.0, -1.0, 1.0, 1.0);
    CHECK_THROWS_AS(simulate(m, {}, StepInput{}, 0.0, 4), Error);
    CHECK_THROWS_AS(simulate(m, {}, StepInput{}, 1.0, 0), Error);
  }
}

TEST_CASE("transfer") {
  const LtiModel m = test::scalar_model(1.0, -1.0, 1.0, 1.0);
  CHECK(std::abs(transfer(m, {}, 0.0)(0, 0) - 1.0) <= 1e-15);
  const Complex h = transfer(m, {}, Complex(0, 1))(0, 0);
  CHECK(std::abs(h - 1.0 / Complex(1, 1)) <= 1e-15);
  CHECK(std::abs(std::abs(h) - 1.0 / std::sqrt(2.0)) <= 1e-15);

  try {
    transfer(m, {}, -1.0);
    FAIL("expected pole hit");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kPoleHit);
  }

  std::mt19937_64 rng(12);
  const LtiModel big = random_affine_model(rng);
  const Parameter mu{0.4, 0.9};
  for (Complex s : {Complex(0.3, 2.0), Complex(-0.1, 0.5), Complex(4.0, -7.0)}) {
    const ComplexMatrix h1 = transfer(big, mu, s);
    const ComplexMatrix h2 = transfer(big, mu, std::conj(s));
    CHECK((h1.conjugate() - h2).norm() <= 1e-12 * h1.norm());
  }
}

TEST_CASE("identity-projected ROM transfer matches the FOM on the imaginary axis") {
  std::mt19937_64 rng(14);
  const DenseMatrix a = test::random_stable(8, rng);
  const LtiModel fom = test::dense_model(a, DenseMatrix::Identity(8, 8), random_matrix(8, 2, rng),
                                         random_matrix(2, 8, rng));
  const LtiModel rom = project(fom, BasisPair::galerkin_basis(DenseMatrix::Identity(8, 8)));
  std::uniform_real_distribution<double> omega(-10.0, 10.0);
  for (int i = 0; i < 10; ++i) {
    const Complex s(0.0, omega(rng));
    const ComplexMatrix hf = transfer(fom, {}, s);
    CHECK((transfer(rom, {}, s) - hf).norm() <= 1e-10 * hf.norm());
  }
}

TEST_CASE("error_system") {
  std::mt19937_64 rng(16);
  const LtiModel fom = random_affine_model(rng);
  const Parameter mu{0.5, 0.1};
  const LtiModel rom = project(fom, BasisPair::galerkin_basis(orthonormalize(random_matrix(10, 4, rng))));
  const LtiModel err = error_system(fom, rom, mu);
  CHECK(err.order() == 14);
  CHECK(err.num_inputs() == 2);
  CHECK(err.num_outputs() == 3);
  CHECK(err.num_parameters() == 0);
  for (Complex s : {Complex(0.0, 1.0), Complex(2.0, 3.0), Complex(0.0, 25.0)}) {
    const ComplexMatrix diff = transfer(fom, mu, s) - transfer(rom, mu, s);
    CHECK((transfer(err, {}, s) - diff).norm() <= 1e-10 * std::max(1.0, diff.norm()));
  }
  const LtiModel wrong = test::diag2_model();
  CHECK_THROWS_AS(error_system(fom, wrong, mu), Error);
}

TEST_CASE("poles") {
  const auto p = poles(test::diag2_model(), {});
  REQUIRE(p.size() == 2);
  CHECK(p(0).real() == doctest::Approx(-2.0));
  CHECK(p(1).real() == doctest::Approx(-1.0));

  const Index n = kSmallProblemLimit + 1;
  SparseMatrix id(n, n);
  id.setIdentity();
  const LtiModel big(Operator(id), AffineMatrix(Operator(SparseMatrix(-id))), DenseMatrix::Ones(n, 1),
                     DenseMatrix::Ones(1, n));
  try {
    poles(big, {});
    FAIL("expected unsupported size");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kUnsupportedSize);
  }
}

TEST_CASE("Galerkin ROMs of a symmetric negative definite model are stable") {
  std::mt19937_64 rng(18);
  const Index n = 30;
  const SparseMatrix k = test::tridiagonal_spd(n);
  const LtiModel fom(Operator(SparseMatrix(0.5 * k)), AffineMatrix(Operator(SparseMatrix(-k))),
                     DenseMatrix::Ones(n, 1), DenseMatrix::Ones(1, n));
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix v = orthonormalize(random_matrix(n, 1 + trial, rng));
    const auto p = poles(project(fom, BasisPair::galerkin_basis(v)), {});
    CHECK(p.real().maxCoeff() < 0.0);
  }
}
