#include <cmath>

#include "doctest.h"
#include "mor/thermalblock.hpp"
#include "test_util.hpp"

using namespace mor;
using thermalblock::OutputMode;
using thermalblock::Spec;

namespace {

Parameter random_positive(Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> expo(-2.0, 2.0);
  DenseVector v(d);
  for (Index i = 0; i < d; ++i) v(i) = std::pow(10.0, expo(rng));
  return Parameter(v);
}

}  // namespace

TEST_CASE("unit conductivity gives the standard Laplacian") {
  const Spec spec{2, 6, OutputMode::kBlockAverages};
  const LtiModel m = thermalblock::build(spec);
  CHECK(m.order() == 36);
  CHECK(m.num_parameters() == 4);
  CHECK(m.num_inputs() == 1);
  CHECK(m.num_outputs() == 4);
  const DenseMatrix a = m.a_at(Parameter::ones(4)).to_dense();
  // 5-point stencil built independently
  const Index g = 6;
  DenseMatrix lap = DenseMatrix::Zero(36, 36);
  for (Index iy = 0; iy < g; ++iy) {
    for (Index ix = 0; ix < g; ++ix) {
      const Index p = iy * g + ix;
      lap(p, p) = -4.0;
      if (ix > 0) lap(p, p - 1) = 1.0;
      if (ix + 1 < g) lap(p, p + 1) = 1.0;
      if (iy > 0) lap(p, p - g) = 1.0;
      if (iy + 1 < g) lap(p, p + g) = 1.0;
    }
  }
  CHECK((a - lap).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(a);
  CHECK(eig.eigenvalues().maxCoeff() < 0.0);
  const double h = 1.0 / 7.0;
  CHECK((m.e().to_dense() - h * h * DenseMatrix::Identity(36, 36)).norm() == 0.0);
  CHECK((m.b().array() == h * h).all());
  CHECK((m.energy_product().matrix().to_dense() + a).norm() == 0.0);
}

TEST_CASE("single block has zero constant term and is homogeneous") {
  const Spec spec{1, 4, OutputMode::kBlockAverages};
  const LtiModel m = thermalblock::build(spec);
  CHECK(m.order() == 16);
  CHECK(m.num_parameters() == 1);
  CHECK(m.a().constant_term().frobenius_norm() == 0.0);
  const DenseMatrix a1 = m.a_at(Parameter{1.5}).to_dense();
  const DenseMatrix a2 = m.a_at(Parameter{3.0}).to_dense();
  CHECK((a2 - 2.0 * a1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(thermalblock::verify_affine_consistency(spec, Parameter{0.37}) == 0.0);
  CHECK(thermalblock::verify_affine_consistency({1, 7, OutputMode::kDomainAverage}, Parameter{12.0}) == 0.0);
}

TEST_CASE("affine and monolithic assemblies agree") {
  std::mt19937_64 rng(5);
  const Spec spec{2, 8, OutputMode::kBlockAverages};
  for (int trial = 0; trial < 5; ++trial) {
    CHECK(thermalblock::verify_affine_consistency(spec, random_positive(4, rng)) <= 1e-13);
  }
  CHECK(thermalblock::verify_affine_consistency(spec, Parameter::ones(4)) == 0.0);
  CHECK(thermalblock::verify_affine_consistency({3, 9, OutputMode::kBlockAverages},
                                                random_positive(9, rng)) <= 1e-13);
}

TEST_CASE("A(mu) is symmetric negative definite and monotone in mu") {
  std::mt19937_64 rng(7);
  const Spec spec{2, 8, OutputMode::kBlockAverages};
  const LtiModel m = thermalblock::build(spec);
  const DenseVector x = test::random_matrix(64, 1, rng).col(0);
  for (int trial = 0; trial < 5; ++trial) {
    const Parameter mu = random_positive(4, rng);
    const DenseMatrix a = m.a_at(mu).to_dense();
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::LLT<DenseMatrix> llt(-a);
    CHECK(llt.info() == Eigen::Success);

    double previous = -x.dot(a * x);
    DenseVector bumped = mu.values;
    for (int step = 0; step < 3; ++step) {
      bumped(trial % 4) *= 2.0;
      const double value = -x.dot(m.a_at(Parameter(bumped)).to_dense() * x);
      CHECK(value >= previous);
      previous = value;
    }
  }
}

TEST_CASE("output rows average") {
  const LtiModel blocks = thermalblock::build({2, 8, OutputMode::kBlockAverages});
  for (Index i = 0; i < 4; ++i) CHECK(blocks.c().row(i).sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((blocks.c().array() != 0.0).count() == 64);
  const LtiModel domain = thermalblock::build({2, 8, OutputMode::kDomainAverage});
  CHECK(domain.num_outputs() == 1);
  CHECK(domain.c().sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("one-parameter variant") {
  const Spec spec{2, 8, OutputMode::kBlockAverages};
  const LtiModel full = thermalblock::build(spec);
  const LtiModel one = thermalblock::build_one_parameter(spec, 0);
  CHECK(one.num_parameters() == 1);
  for (double mu : {1e-6, 0.3, 1.0, 100.0}) {
    const DenseMatrix direct = full.a_at(Parameter{mu, 1.0, 1.0, 1.0}).to_dense();
    CHECK((one.a_at(Parameter{mu}).to_dense() - direct).cwiseAbs().maxCoeff() <= 1e-13);
  }
  CHECK((one.energy_product().matrix().to_dense() - full.energy_product().matrix().to_dense()).norm() == 0.0);
  CHECK_THROWS_AS(thermalblock::build_one_parameter(spec, 4), Error);
}

TEST_CASE("invalid specs") {
  CHECK_THROWS_AS(thermalblock::build({0, 4, OutputMode::kBlockAverages}), Error);
  CHECK_THROWS_AS(thermalblock::build({3, 4, OutputMode::kBlockAverages}), Error);
  CHECK_THROWS_AS(thermalblock::build({5, 4, OutputMode::kBlockAverages}), Error);
}

TEST_CASE("Galerkin ROMs of the thermal block are stable") {
  std::mt19937_64 rng(9);
  const Spec spec{2, 8, OutputMode::kBlockAverages};
  const LtiModel m = thermalblock::build(spec);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMatrix v = orthonormalize(test::random_matrix(64, 3 + 2 * trial, rng));
    const LtiModel rom = project(m, BasisPair::galerkin_basis(v));
    CHECK(poles(rom, random_positive(4, rng)).real().maxCoeff() < 0.0);
  }
}

TEST_CASE("step response reaches the steady state") {
  const Spec spec{2, 6, OutputMode::kBlockAverages};
  const LtiModel m = thermalblock::build(spec);
  const Parameter mu{1.0, 0.5, 2.0, 1.0};
  const Trajectory t = simulate(m, mu, StepInput{1.0}, 2.0, 400);
  const DenseVector steady = -m.a_at(mu).to_dense().lu().solve(m.b());
  CHECK((t.states.col(400) - steady).norm() <= 1e-3 * steady.norm());
}
