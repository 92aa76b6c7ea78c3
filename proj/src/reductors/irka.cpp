#include <algorithm>
#include <cmath>

#include "mor/reductors.hpp"

namespace mor {

namespace {

constexpr double kRealTol = 1e-10;
constexpr double kSymmetricTol = 1e-12;

struct Interpolation {
  std::vector<Complex> shifts;
  std::vector<ComplexVector> right;  // m-vectors
  std::vector<ComplexVector> left;   // p-vectors
};

bool is_real_shift(Complex s) { return std::abs(s.imag()) <= kRealTol * std::abs(s); }

// Rotates v so that its largest entry is real and positive.
ComplexVector normalize_phase(const ComplexVector& v) {
  Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (std::abs(v(k)) == 0.0) return v;
  return v * (std::abs(v(k)) / v(k));
}

bool shift_less(Complex x, Complex y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() > y.imag();
}

double max_relative_change(std::vector<Complex> previous, std::vector<Complex> next) {
  std::sort(previous.begin(), previous.end(), shift_less);
  std::sort(next.begin(), next.end(), shift_less);
  double change = 0.0;
  for (std::size_t i = 0; i < previous.size(); ++i) {
    change = std::max(change, std::abs(next[i] - previous[i]) / std::abs(previous[i]));
  }
  return change;
}

std::vector<Complex> spectrum_estimate(const Operator& a, const Operator& e, Index r, Index steps) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const Complex& z : ritz_values(a, e, steps)) {
    const double m = std::abs(z);
    if (m > 0.0 && std::isfinite(m)) {
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
  }
  if (!(hi > 0.0)) lo = hi = 1.0;
  std::vector<Complex> shifts;
  if (r == 1) {
    shifts.emplace_back(std::sqrt(lo * hi), 0.0);
    return shifts;
  }
  const double step = std::log(hi / lo) / static_cast<double>(r - 1);
  for (Index i = 0; i < r; ++i) shifts.emplace_back(lo * std::exp(step * static_cast<double>(i)), 0.0);
  return shifts;
}

Interpolation initial_interpolation(const LtiModel& fom, const Operator& a, Index r, const IrkaOptions& options) {
  Interpolation out;
  if (options.init == IrkaInit::kExplicitShifts) {
    if (static_cast<Index>(options.initial_shifts.size()) != r) {
      throw Error(ErrorCode::kInvalidInput, "irka: need exactly r initial shifts");
    }
    out.shifts = options.initial_shifts;
  } else {
    out.shifts = spectrum_estimate(a, fom.e(), r, options.ritz_steps);
  }
  for (Complex& s : out.shifts) {
    if (s.real() < 0.0) s = -std::conj(s);
    if (is_real_shift(s)) s = Complex(s.real(), 0.0);
  }
  for (Index i = 0; i < r; ++i) {
    out.right.push_back(ComplexVector::Ones(fom.num_inputs()));
    out.left.push_back(ComplexVector::Ones(fom.num_outputs()));
  }
  return out;
}

// (s E - A)^{-1} rhs, or the transposed solve. A singular shift is moved by
// 1e-8 |s| once.
ComplexMatrix shifted_solve(const Operator& e, const Operator& a, Complex s, const ComplexMatrix& rhs,
                            bool transposed) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      const Factorization<Complex> lu = shifted_factorization<Complex>(e, a, s);
      return transposed ? lu.solve_transpose(rhs) : lu.solve(rhs);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kSingularSystem) throw;
      s += 1e-8 * std::abs(s);
    }
  }
  throw Error(ErrorCode::kPoleHit, "irka: interpolation point coincides with a pole");
}

// Real basis from complex directions; only one member of each conjugate pair
// is used, split into real and imaginary parts.
DenseMatrix realified_basis(const Operator& e, const Operator& a, const DenseMatrix& input,
                            const Interpolation& ip, bool transposed) {
  const Index r = static_cast<Index>(ip.shifts.size());
  DenseMatrix basis(e.rows(), r);
  Index col = 0;
  const ComplexMatrix input_c = input.cast<Complex>();
  for (Index i = 0; i < r; ++i) {
    const Complex s = ip.shifts[static_cast<std::size_t>(i)];
    if (s.imag() < 0.0) continue;
    const ComplexVector& dir = transposed ? ip.left[static_cast<std::size_t>(i)] : ip.right[static_cast<std::size_t>(i)];
    const ComplexVector x = shifted_solve(e, a, s, input_c * dir, transposed).col(0);
    if (s.imag() == 0.0 || col + 1 >= r) {
      basis.col(col++) = x.real();
    } else {
      basis.col(col++) = x.real();
      basis.col(col++) = x.imag();
    }
  }
  if (col != r) throw Error(ErrorCode::kInvalidInput, "irka: shift set is not closed under conjugation");
  return Eigen::HouseholderQR<DenseMatrix>(basis).householderQ() * DenseMatrix::Identity(basis.rows(), r);
}

struct ProjectedSpectrum {
  ComplexVector values;
  ComplexMatrix right;
  ComplexMatrix left;
};

Interpolation next_interpolation(const ProjectedSpectrum& spec, const LtiModel& rom) {
  Interpolation out;
  const Index r = spec.values.size();
  const ComplexMatrix b_r = rom.b().cast<Complex>();
  const ComplexMatrix c_r = rom.c().cast<Complex>();
  for (Index i = 0; i < r; ++i) {
    Complex s = -spec.values(i);
    if (s.real() < 0.0) s = std::conj(spec.values(i));
    ComplexVector b = b_r.transpose() * spec.left.col(i);
    ComplexVector c = c_r * spec.right.col(i);
    if (is_real_shift(s)) {
      s = Complex(s.real(), 0.0);
      b = normalize_phase(b).real().cast<Complex>();
      c = normalize_phase(c).real().cast<Complex>();
    }
    out.shifts.push_back(s);
    out.right.push_back(b);
    out.left.push_back(c);
  }
  return out;
}

ProjectedSpectrum general_spectrum(const LtiModel& rom) {
  const GeneralizedEigen eig = small_generalized_eig(rom.a().constant_term().to_dense(), rom.e().to_dense());
  return ProjectedSpectrum{eig.values, eig.right, eig.left};
}

// Symmetric-definite projected pencil: real eigenpairs with X^T E X = I.
ProjectedSpectrum symmetric_spectrum(const LtiModel& rom) {
  const DenseMatrix a = rom.a().constant_term().to_dense();
  const DenseMatrix e = rom.e().to_dense();
  const ComplexVector general = small_generalized_eig(a, e).values;
  const double scale = general.cwiseAbs().maxCoeff();
  for (Index i = 0; i < general.size(); ++i) {
    if (std::abs(general(i).imag()) > 1e-8 * scale) {
      throw Error(ErrorCode::kInternalConsistency, "os_irka: complex pole of a symmetric-definite projection");
    }
  }
  const Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(0.5 * (a + a.transpose()),
                                                                  0.5 * (e + e.transpose()));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kInternalConsistency, "os_irka: projected E is not positive definite");
  }
  const ComplexMatrix x = es.eigenvectors().cast<Complex>();
  return ProjectedSpectrum{es.eigenvalues().cast<Complex>(), x, x};
}

ReductionResult run_irka(const LtiModel& fom, const Parameter& mu, Index r, const IrkaOptions& options,
                         bool one_sided) {
  if (r < 1 || r > fom.order()) throw Error(ErrorCode::kInvalidInput, "irka: order must satisfy 1 <= r <= n");
  if (options.max_iter < 1 || !(options.conv_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "irka: max_iter >= 1 and conv_tol > 0 required");
  }
  const LtiModel frozen = fom.at(mu);
  const Operator& a = frozen.a().constant_term();
  const Operator& e = frozen.e();
  const bool symmetric = one_sided && e.is_symmetric(kSymmetricTol) && a.is_symmetric(kSymmetricTol);
  const DenseMatrix c_t = frozen.c().transpose();

  Interpolation current = initial_interpolation(frozen, a, r, options);
  Diagnostics diag;
  diag.method = one_sided ? "OS-IRKA" : "IRKA";
  diag.requested_order = r;
  diag.converged = false;
  BasisPair basis;
  LtiModel rom = frozen;
  for (Index iter = 0; iter < options.max_iter; ++iter) {
    DenseMatrix v = realified_basis(e, a, frozen.b(), current, false);
    if (one_sided) {
      basis = BasisPair::galerkin_basis(std::move(v));
    } else {
      DenseMatrix w = realified_basis(e, a, c_t, current, true);
      basis = BasisPair::petrov_galerkin(std::move(v), std::move(w));
    }
    rom = project(frozen, basis);
    diag.iterations = iter + 1;
    diag.shifts = current.shifts;
    diag.right_tangents = current.right;
    diag.left_tangents = current.left;

    const ProjectedSpectrum spec = symmetric ? symmetric_spectrum(rom) : general_spectrum(rom);
    Interpolation next = next_interpolation(spec, rom);
    if (one_sided) {
      for (const Complex& s : next.shifts) {
        if (symmetric && !(s.imag() == 0.0 && s.real() > 0.0)) {
          throw Error(ErrorCode::kInternalConsistency, "os_irka: shift left the positive real axis");
        }
      }
    }
    const double change = max_relative_change(current.shifts, next.shifts);
    diag.shift_changes.push_back(change);
    if (change <= options.conv_tol) {
      diag.converged = true;
      break;
    }
    current = std::move(next);
  }
  if (!diag.converged) diag.notes.push_back("shift iteration did not converge");
  diag.order = basis.order();
  return ReductionResult{std::move(rom), std::move(basis), std::move(diag)};
}

}  // namespace

ReductionResult irka(const LtiModel& fom, const Parameter& mu, Index r, const IrkaOptions& options) {
  return run_irka(fom, mu, r, options, false);
}

ReductionResult os_irka(const LtiModel& fom, const Parameter& mu, Index r, const IrkaOptions& options) {
  return run_irka(fom, mu, r, options, true);
}

}  // namespace mor
