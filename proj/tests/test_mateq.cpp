#include <cmath>

#include "doctest.h"
#include "mor/mateq.hpp"
#include "mor/thermalblock.hpp"
#include "test_util.hpp"

using namespace mor;
using mor::test::random_matrix;

namespace {

DenseMatrix scalar(double v) { return DenseMatrix::Constant(1, 1, v); }

DenseMatrix diag2_a() {
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a.diagonal() << -1.0, -2.0;
  return a;
}

double rel_diff(const DenseMatrix& x, const DenseMatrix& y) { return (x - y).norm() / y.norm(); }

}  // namespace

TEST_CASE("dense Lyapunov scalar and diagonal examples") {
  CHECK(solve_lyapunov_dense(scalar(-1), scalar(1), scalar(1))(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(solve_lyapunov_dense(scalar(-2), scalar(2), scalar(2))(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

  DenseMatrix expected(2, 2);
  expected << 1.0 / 2, 1.0 / 3, 1.0 / 3, 1.0 / 4;
  const DenseMatrix ones = DenseMatrix::Ones(2, 1);
  const DenseMatrix p = solve_lyapunov_dense(diag2_a(), DenseMatrix::Identity(2, 2), ones);
  CHECK((p - expected).cwiseAbs().maxCoeff() <= 1e-15);
  const DenseMatrix pk = solve_lyapunov_kronecker(diag2_a(), DenseMatrix::Identity(2, 2), ones);
  CHECK((pk - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("dense Lyapunov matches the Kronecker oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    const Index n = 3 + 4 * trial;
    const DenseMatrix a = test::random_stable(n, rng);
    const DenseMatrix e = DenseMatrix::Identity(n, n) + 0.2 * random_matrix(n, n, rng) / std::sqrt(double(n));
    const DenseMatrix b = random_matrix(n, 2, rng);
    const DenseMatrix p = solve_lyapunov_dense(a, e, b);
    const DenseMatrix pk = solve_lyapunov_kronecker(a, e, b);
    CHECK(rel_diff(p, pk) <= 1e-9);
    CHECK(lyapunov_residual(a, e, p, b) <= 1e-10);
    CHECK((p - p.transpose()).norm() <= 1e-12 * p.norm());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(p);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * p.norm());
  }
}

TEST_CASE("symmetric-definite fast path") {
  std::mt19937_64 rng(33);
  const Index n = 12;
  const DenseMatrix k = DenseMatrix(test::tridiagonal_spd(n));
  const DenseMatrix g = random_matrix(n, n, rng);
  const DenseMatrix e = g * g.transpose() / double(n) + DenseMatrix::Identity(n, n);
  const DenseMatrix b = random_matrix(n, 1, rng);
  const DenseMatrix c = random_matrix(2, n, rng);
  DenseLyapunovSolver solver(-k, e);
  CHECK(solver.symmetric_path());
  const DenseMatrix p = solver.controllability(b);
  CHECK(rel_diff(p, solve_lyapunov_kronecker(-k, e, b)) <= 1e-10);
  const DenseMatrix q = solver.observability(c);
  CHECK(rel_diff(q, solve_lyapunov_kronecker(-k, e, c.transpose())) <= 1e-10);
}

TEST_CASE("observability side is the dual controllability problem") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 4; ++trial) {
    const Index n = 6 + 5 * trial;
    const DenseMatrix a = test::random_stable(n, rng);
    const DenseMatrix e = DenseMatrix::Identity(n, n) + 0.3 * random_matrix(n, n, rng) / std::sqrt(double(n));
    const DenseMatrix c = random_matrix(3, n, rng);
    DenseLyapunovSolver solver(a, e);
    CHECK_FALSE(solver.symmetric_path());
    const DenseMatrix q = solver.observability(c);
    const DenseMatrix dual = solve_lyapunov_dense(a.transpose(), e.transpose(), c.transpose());
    CHECK(rel_diff(q, dual) <= 1e-9);
    CHECK(rel_diff(q, solve_lyapunov_kronecker(a.transpose(), e.transpose(), c.transpose())) <= 1e-9);
  }
}

TEST_CASE("dense Lyapunov rejects unstable pencils") {
  DenseMatrix a = diag2_a();
  a(1, 1) = 0.5;
  try {
    solve_lyapunov_dense(a, DenseMatrix::Identity(2, 2), DenseMatrix::Ones(2, 1));
    FAIL("expected instability");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kUnstable);
  }
  DenseMatrix rot(2, 2);
  rot << 0.1, 1.0, -1.0, 0.1;
  CHECK_THROWS_AS(solve_lyapunov_dense(rot, DenseMatrix::Identity(2, 2), DenseMatrix::Ones(2, 1)), Error);
}

TEST_CASE("gramian_factor") {
  std::mt19937_64 rng(37);
  const DenseMatrix g = random_matrix(8, 3, rng);
  const DenseMatrix p = g * g.transpose();
  const DenseMatrix z = gramian_factor(p);
  CHECK(z.cols() == 3);
  CHECK((z * z.transpose() - p).norm() <= 1e-12 * p.norm());
  CHECK(gramian_factor(DenseMatrix::Zero(4, 4)).cols() == 0);
}

TEST_CASE("Riccati examples") {
  const RiccatiSolution s = solve_riccati_dense(scalar(-1), scalar(1), scalar(1), scalar(1));
  CHECK(std::abs(s.p(0, 0) - (std::sqrt(2.0) - 1.0)) <= 1e-10);

  std::mt19937_64 rng(39);
  const Index n = 7;
  const DenseMatrix a = test::random_stable(n, rng);
  const DenseMatrix e = DenseMatrix::Identity(n, n);
  const DenseMatrix b = random_matrix(n, 2, rng);
  const DenseMatrix lyap = solve_lyapunov_dense(a, e, b);
  const RiccatiSolution no_output = solve_riccati_dense(a, e, b, DenseMatrix::Zero(1, n));
  CHECK((no_output.p - lyap).norm() <= 1e-12 * lyap.norm());

  const RiccatiSolution no_input = solve_riccati_dense(a, e, DenseMatrix::Zero(n, 1), random_matrix(1, n, rng));
  CHECK(no_input.p.isZero(0.0));
}

TEST_CASE("Riccati Newton iterates") {
  std::mt19937_64 rng(41);
  const Index n = 15;
  const DenseMatrix a = test::random_stable(n, rng);
  const DenseMatrix e = DenseMatrix::Identity(n, n) + 0.1 * random_matrix(n, n, rng) / std::sqrt(double(n));
  const DenseMatrix b = random_matrix(n, 2, rng);
  const DenseMatrix c = 3.0 * random_matrix(2, n, rng);
  const RiccatiSolution s = solve_riccati_dense(a, e, b, c);
  CHECK(riccati_residual(a, e, s.p, b, c) <= 1e-9);
  for (std::size_t k = 2; k < s.residuals.size(); ++k) CHECK(s.residuals[k] <= s.residuals[k - 1]);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(s.p);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * s.p.norm());
  // stabilizing: closed loop pencil is stable
  const DenseMatrix closed = a - e * s.p * c.transpose() * c;
  const auto poles = small_generalized_eig(closed, e);
  CHECK(poles.values.real().maxCoeff() < 0.0);

  const RiccatiSolution dual = solve_riccati_dense(a.transpose(), e.transpose(), c.transpose(), b.transpose());
  CHECK(riccati_residual(a.transpose(), e.transpose(), dual.p, c.transpose(), b.transpose()) <= 1e-9);
}

TEST_CASE("adi_shifts") {
  SUBCASE("scalar") {
    const ShiftSet s = adi_shifts(Operator(scalar(-3)), Operator(scalar(1)), 5, 10);
    REQUIRE(s.shifts.size() == 1);
    CHECK(std::abs(s.shifts[0] - Complex(-3.0)) <= 1e-12);
  }
  SUBCASE("symmetric spectrum gives real shifts inside the spectrum") {
    const LtiModel m = thermalblock::build({2, 8, thermalblock::OutputMode::kBlockAverages});
    const Operator a = m.a_at(Parameter::ones(4));
    const ShiftSet s = adi_shifts(a, m.e(), 20, 40);
    CHECK(!s.shifts.empty());
    CHECK(s.shifts.size() <= 20);
    CHECK(s.note.empty());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(a.to_dense() / m.e().to_dense()(0, 0));
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    for (const Complex& p : s.shifts) {
      CHECK(p.imag() == 0.0);
      CHECK(p.real() >= lo * (1 + 1e-10));
      CHECK(p.real() <= hi * (1 - 1e-10));
    }
  }
  SUBCASE("conjugate closure") {
    std::mt19937_64 rng(43);
    const DenseMatrix a = test::random_stable(20, rng);
    const ShiftSet s = adi_shifts(Operator(a), Operator::identity(20), 12, 20);
    for (std::size_t i = 0; i < s.shifts.size(); ++i) {
      CHECK(s.shifts[i].real() < 0.0);
      if (s.shifts[i].imag() > 0.0) {
        REQUIRE(i + 1 < s.shifts.size());
        CHECK(s.shifts[i + 1] == std::conj(s.shifts[i]));
      }
    }
  }
}

TEST_CASE("lr_adi examples") {
  SUBCASE("scalar single step is exact") {
    const ShiftSet shift{{Complex(-1.0)}, ""};
    const LowRankFactor f = lr_adi(Operator(scalar(-1)), Operator(scalar(1)), scalar(1), shift, 1e-12, 10);
    CHECK(f.converged);
    CHECK(f.iterations == 1);
    REQUIRE(f.z.cols() == 1);
    CHECK(std::abs(std::abs(f.z(0, 0)) - 1.0 / std::sqrt(2.0)) <= 1e-15);
  }
  SUBCASE("diagonal 2x2") {
    const LowRankFactor f = lr_adi(Operator(diag2_a()), Operator::identity(2), DenseMatrix::Ones(2, 1),
                                   AdiOptions{20, 40, 1e-10, 500});
    CHECK(f.converged);
    DenseMatrix expected(2, 2);
    expected << 1.0 / 2, 1.0 / 3, 1.0 / 3, 1.0 / 4;
    CHECK((f.z * f.z.transpose() - expected).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("lr_adi on the thermal block matches the dense Gramian") {
  const LtiModel m = thermalblock::build({2, 8, thermalblock::OutputMode::kBlockAverages});
  const Operator a = m.a_at(Parameter::ones(4));
  const LowRankFactor f = lr_adi(a, m.e(), m.b());
  CHECK(f.converged);
  for (std::size_t k = 1; k < f.residuals.size(); ++k) CHECK(f.residuals[k] <= f.residuals[k - 1] * (1 + 1e-12));
  const DenseMatrix p = solve_lyapunov_dense(a.to_dense(), m.e().to_dense(), m.b());
  CHECK(rel_diff(f.z * f.z.transpose(), p) <= 1e-6);

  const LowRankFactor fq = lr_adi(a.transpose(), m.e().transpose(), m.c().transpose());
  const DenseMatrix q = solve_lyapunov_dense(a.to_dense().transpose(), m.e().to_dense(), m.c().transpose());
  CHECK(rel_diff(fq.z * fq.z.transpose(), q) <= 1e-6);
}

TEST_CASE("lr_adi with complex shifts") {
  std::mt19937_64 rng(45);
  const Index n = 30;
  const DenseMatrix a = test::random_stable(n, rng);
  const DenseMatrix b = random_matrix(n, 2, rng);
  const LowRankFactor f = lr_adi(Operator(a), Operator::identity(n), b, AdiOptions{30, 30, 1e-12, 2000});
  const DenseMatrix p = solve_lyapunov_dense(a, DenseMatrix::Identity(n, n), b);
  CHECK(f.converged);
  CHECK(rel_diff(f.z * f.z.transpose(), p) <= 1e-8);
}

TEST_CASE("lr_adi reports non-convergence") {
  const LtiModel m = thermalblock::build({2, 8, thermalblock::OutputMode::kBlockAverages});
  const ShiftSet poor{{Complex(-1.0)}, ""};
  const LowRankFactor f = lr_adi(m.a_at(Parameter::ones(4)), m.e(), m.b(), poor, 1e-12, 5);
  CHECK_FALSE(f.converged);
  CHECK(f.iterations == 5);
}

TEST_CASE("sparse-dense Sylvester solve") {
  std::mt19937_64 rng(47);
  const Index n = 9;
  const Index r = 5;
  const DenseMatrix a = test::random_stable(n, rng);
  const DenseMatrix e = DenseMatrix::Identity(n, n) + 0.1 * random_matrix(n, n, rng);
  const DenseMatrix ar = test::random_stable(r, rng);
  const DenseMatrix er = DenseMatrix::Identity(r, r) + 0.1 * random_matrix(r, r, rng);
  const DenseMatrix b = random_matrix(n, 2, rng);
  const DenseMatrix br = random_matrix(r, 2, rng);
  const DenseMatrix x = solve_sylvester_sparse_dense(Operator(SparseMatrix(a.sparseView())), Operator(e), ar, er, b, br);
  const DenseMatrix residual = a * x * er.transpose() + e * x * ar.transpose() + b * br.transpose();
  CHECK(residual.norm() <= 1e-11 * (b * br.transpose()).norm());

  // the off-diagonal block of the block-diagonal Gramian
  DenseMatrix big_a = DenseMatrix::Zero(n + r, n + r);
  big_a.topLeftCorner(n, n) = a;
  big_a.bottomRightCorner(r, r) = ar;
  DenseMatrix big_e = DenseMatrix::Zero(n + r, n + r);
  big_e.topLeftCorner(n, n) = e;
  big_e.bottomRightCorner(r, r) = er;
  DenseMatrix big_b(n + r, 2);
  big_b << b, br;
  const DenseMatrix full = solve_lyapunov_kronecker(big_a, big_e, big_b);
  CHECK(rel_diff(x, full.topRightCorner(n, r)) <= 1e-9);
}
