#include <cmath>

#include "doctest.h"
#include "mor/metrics.hpp"
#include "mor/reductors.hpp"
#include "mor/thermalblock.hpp"
#include "test_util.hpp"

using namespace mor;

namespace {

LtiModel random_model(Index n, Index m, Index p, std::mt19937_64& rng) {
  return test::dense_model(test::random_stable(n, rng), DenseMatrix::Identity(n, n), test::random_matrix(n, m, rng),
                           test::random_matrix(p, n, rng));
}

LtiModel with_output(const LtiModel& m, const DenseMatrix& c) {
  return LtiModel(m.e(), m.a(), m.b(), c, m.energy_product());
}

constexpr SolverKind kBoth[] = {SolverKind::kDense, SolverKind::kLowRank};

// Time horizon and grid resolving the slowest and fastest poles.
double impulse_oracle(const LtiModel& m, const Parameter& mu) {
  const ComplexVector p = poles(m, mu);
  const double slowest = p.real().cwiseAbs().minCoeff();
  const double fastest = p.cwiseAbs().maxCoeff();
  const double t_final = 40.0 / slowest;
  const Index steps = static_cast<Index>(std::ceil(4.0 * t_final * fastest)) + 1000;
  return impulse_quadrature_oracle(m, mu, t_final, steps);
}

H2ErrorOptions frequency_options() {
  H2ErrorOptions o;
  o.method = H2ErrorMethod::kFrequency;
  return o;
}

}  // namespace

TEST_CASE("h2_norm analytic values") {
  const LtiModel scalar = test::scalar_model(1.0, -1.0, 1.0, 1.0);
  const LtiModel diag2 = test::diag2_model();
  for (SolverKind solver : kBoth) {
    for (GramianSide side : {GramianSide::kControllability, GramianSide::kObservability}) {
      CHECK(h2_norm(scalar, Parameter{}, solver, side).value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
      CHECK(h2_norm(diag2, Parameter{}, solver, side).value ==
            doctest::Approx(std::sqrt(17.0 / 12.0)).epsilon(1e-9));
    }
  }
  const H2Report blind = h2_norm(test::scalar_model(1.0, -1.0, 1.0, 0.0), Parameter{}, SolverKind::kDense);
  CHECK(blind.value == 0.0);

  try {
    h2_norm(test::scalar_model(1.0, 1.0, 1.0, 1.0), Parameter{}, SolverKind::kDense);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnstable);
  }
}

TEST_CASE("impulse quadrature oracle") {
  const LtiModel scalar = test::scalar_model(1.0, -1.0, 1.0, 1.0);
  CHECK(std::abs(impulse_quadrature_oracle(scalar, Parameter{}, 40.0, 4000) - std::sqrt(0.5)) <= 1e-6);
  CHECK(std::abs(impulse_quadrature_oracle(test::diag2_model(), Parameter{}, 40.0, 4000) -
                 std::sqrt(17.0 / 12.0)) <= 1e-5);
  CHECK(impulse_quadrature_oracle(test::scalar_model(1.0, -1.0, 1.0, 0.0), Parameter{}, 40.0, 100) == 0.0);
}

TEST_CASE("h2_norm agrees with quadrature and across Gramians") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    const LtiModel m = random_model(6 + trial, 1 + trial % 2, 2, rng);
    const double ctrl = h2_norm(m, Parameter{}, SolverKind::kDense).value;
    const double obs = h2_norm(m, Parameter{}, SolverKind::kDense, GramianSide::kObservability).value;
    CHECK(std::abs(ctrl - obs) <= 1e-6 * ctrl);
    const double quad = impulse_quadrature_oracle(m, Parameter{}, 60.0, 6000);
    CHECK(std::abs(ctrl - quad) <= 1e-4 * ctrl);
    const double lowrank = h2_norm(m, Parameter{}, SolverKind::kLowRank).value;
    CHECK(std::abs(ctrl - lowrank) <= 1e-6 * ctrl);
  }
}

TEST_CASE("h2_error trivial cases") {
  std::mt19937_64 rng(23);
  const LtiModel fom = random_model(7, 2, 2, rng);
  const LtiModel same = project(fom, BasisPair::galerkin_basis(DenseMatrix::Identity(7, 7)));
  const LtiModel doubled = with_output(fom, 2.0 * fom.c());
  const double norm = h2_norm(fom, Parameter{}, SolverKind::kDense).value;
  for (SolverKind solver : kBoth) {
    CHECK(h2_error(fom, same, Parameter{}, solver).value <= 1e-7 * norm);
    CHECK(h2_error(fom, doubled, Parameter{}, solver).value == doctest::Approx(norm).epsilon(1e-8));
  }
  CHECK(h2_error(fom, same, Parameter{}, SolverKind::kLowRank).value <= 1e-8);

  DenseMatrix a(1, 1);
  a << 0.5;
  const LtiModel unstable = test::dense_model(a, DenseMatrix::Identity(1, 1), DenseMatrix::Ones(1, 2),
                                              DenseMatrix::Ones(2, 1));
  CHECK_THROWS_AS(h2_error(fom, unstable, Parameter{}, SolverKind::kDense), Error);
}

TEST_CASE("h2_error of BT matches the quadrature oracle on the error system") {
  std::mt19937_64 rng(29);
  const LtiModel fom = random_model(10, 1, 1, rng);
  const H2ErrorEvaluator freq(fom, Parameter{}, frequency_options());
  for (Index r : {2, 4}) {
    const ReductionResult res = bt(fom, Parameter{}, r, SolverKind::kDense);
    const double quad = impulse_oracle(error_system(fom, res.rom, Parameter{}), Parameter{});
    for (SolverKind solver : kBoth) {
      const H2Report err = h2_error(fom, res.rom, Parameter{}, solver);
      CHECK(std::abs(err.value - quad) <= 1e-4 * quad);
      CHECK(err.value <= h2_norm(fom, Parameter{}, solver).value + h2_norm(res.rom, Parameter{}, solver).value + 1e-8);
    }
    CHECK(std::abs(freq.error(res.rom).value - quad) <= 1e-4 * quad);
  }
}

TEST_CASE("h2 error methods on the thermal block") {
  thermalblock::Spec spec;
  spec.grid_points_per_side = 10;
  const LtiModel fom = thermalblock::build(spec);
  const Parameter mu{1.0, 0.1, 10.0, 1.0};
  H2ErrorOptions lowrank_options;
  lowrank_options.solver = SolverKind::kLowRank;
  const H2ErrorEvaluator dense(fom, mu);
  const H2ErrorEvaluator lowrank(fom, mu, lowrank_options);
  const H2ErrorEvaluator freq(fom, mu, frequency_options());
  const double norm = dense.fom_norm().value;
  CHECK(lowrank.fom_norm().value == doctest::Approx(norm).epsilon(1e-7));
  CHECK(freq.fom_norm().value == doctest::Approx(norm).epsilon(1e-7));
  const BalancingFactors factors = bt_factors(fom, mu, SolverKind::kDense);
  for (Index r : {2, 4, 6}) {
    const LtiModel rom = balanced_truncation(fom, mu, r, factors).rom;
    const double d = dense.error(rom).value;
    CHECK(freq.error(rom).value == doctest::Approx(d).epsilon(1e-6));
    CHECK(std::abs(lowrank.error(rom).value - d) <= 1e-4 * norm);
  }
  // small errors: only the frequency method resolves them
  const LtiModel rom = balanced_truncation(fom, mu, 12, factors).rom;
  const double quad = impulse_quadrature_oracle(error_system(fom, rom, mu), mu, 6.0, 200000);
  CHECK(freq.error(rom).value == doctest::Approx(quad).epsilon(1e-3));
}

TEST_CASE("hankel singular values") {
  const LtiModel scalar = test::scalar_model(1.0, -1.0, 1.0, 1.0);
  for (SolverKind solver : kBoth) {
    const std::vector<double> hsv = hankel_singular_values(scalar, Parameter{}, solver);
    REQUIRE(hsv.size() == 1);
    CHECK(hsv[0] == doctest::Approx(0.5).epsilon(1e-10));
  }

  std::mt19937_64 rng(37);
  const Index n = 6;
  const LtiModel m = random_model(n, 2, 1, rng);
  const DenseMatrix t = DenseMatrix::Identity(n, n) + 0.3 * test::random_matrix(n, n, rng);
  const DenseMatrix t_inv = t.inverse();
  const LtiModel similar = test::dense_model(t * m.a_at(Parameter{}).to_dense() * t_inv, DenseMatrix::Identity(n, n),
                                             t * m.b(), m.c() * t_inv);
  const std::vector<double> h1 = hankel_singular_values(m, Parameter{}, SolverKind::kDense);
  const std::vector<double> h2 = hankel_singular_values(similar, Parameter{}, SolverKind::kDense);
  for (std::size_t i = 0; i < h1.size(); ++i) CHECK(std::abs(h1[i] - h2[i]) <= 1e-8 * h1[0]);
  for (std::size_t i = 1; i < h1.size(); ++i) CHECK(h1[i] <= h1[i - 1]);
  CHECK(h1[0] <= sampled_hinf_norm(m, Parameter{}, log_frequency_grid(1e-4, 1e4, 400)) * (1 + 1e-6));

  const LtiModel silent = test::dense_model(m.a_at(Parameter{}).to_dense(), DenseMatrix::Identity(n, n),
                                            DenseMatrix::Zero(n, 2), m.c());
  for (double v : hankel_singular_values(silent, Parameter{}, SolverKind::kDense)) CHECK(v == 0.0);
}

TEST_CASE("bt_error_bound") {
  CHECK(bt_error_bound({3.0, 2.0, 1.0}, 1) == 6.0);
  CHECK(bt_error_bound({3.0, 2.0, 1.0}, 3) == 0.0);
  CHECK(bt_error_bound({3.0, 2.0, 1.0}, 7) == 0.0);
  CHECK(bt_error_bound({0.5}, 0) == 1.0);
  const std::vector<double> hsv{4.0, 1.0, 0.25, 0.01};
  CHECK(bt_error_bound(hsv, 0) == 2.0 * 5.26);
  for (Index r = 1; r <= 4; ++r) CHECK(bt_error_bound(hsv, r) <= bt_error_bound(hsv, r - 1));
}

TEST_CASE("log_frequency_grid") {
  const std::vector<double> g = log_frequency_grid(1e-4, 1e4, 9);
  REQUIRE(g.size() == 9);
  CHECK(g.front() == doctest::Approx(1e-4));
  CHECK(g.back() == doctest::Approx(1e4));
  CHECK(g[4] == doctest::Approx(1.0));
  CHECK_THROWS_AS(log_frequency_grid(0.0, 1.0, 3), Error);
}

TEST_CASE("global basis contains the local spans") {
  thermalblock::Spec spec;
  spec.grid_points_per_side = 10;
  const LtiModel fom = thermalblock::build_one_parameter(spec);
  std::vector<BasisPair> locals;
  for (double mu : {0.01, 10.0}) locals.push_back(bt(fom, Parameter{mu}, 10, SolverKind::kDense).basis);
  const BasisPair global = global_basis(locals, fom.energy_product(), 0.0, 1000);
  CHECK(global.order() <= 40);
  for (const BasisPair& local : locals) {
    // every local column lies in the global span
    const DenseMatrix coeff = fom.energy_product().gram(global.v, local.v);
    CHECK((local.v - global.v * coeff).norm() <= 1e-8 * local.v.norm());
    CHECK((local.w - global.v * fom.energy_product().gram(global.v, local.w)).norm() <= 1e-8 * local.w.norm());
  }
  const LtiModel rom = project(fom, global);
  const double training[] = {0.01, 10.0};
  for (std::size_t i = 0; i < 2; ++i) {
    const Parameter mu{training[i]};
    const H2ErrorEvaluator eval(fom, mu, frequency_options());
    const LtiModel local_rom = project(fom, BasisPair::galerkin_basis(locals[i].v));
    CHECK(eval.error(rom).value <= eval.error(local_rom).value + 1e-8);
  }
  for (double mu : {1e-6, 1e-3, 1.0, 100.0}) {
    const ComplexVector p = poles(rom, Parameter{mu});
    CHECK((p.real().array() < 0.0).all());
  }
}
