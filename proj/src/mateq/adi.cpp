#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "mor/mateq.hpp"

namespace mor {

namespace {

using Apply = std::function<DenseVector(const DenseVector&)>;

// Ritz values of the operator from an Arnoldi process of at most `steps`
// steps. Stops early on an invariant subspace.
std::vector<Complex> arnoldi_ritz(const Apply& op, Index n, Index steps) {
  steps = std::min(steps, n);
  if (steps < 1) return {};
  DenseMatrix v = DenseMatrix::Zero(n, steps + 1);
  DenseMatrix h = DenseMatrix::Zero(steps + 1, steps);
  v.col(0) = DenseVector::Ones(n) / std::sqrt(static_cast<double>(n));
  Index m = steps;
  for (Index j = 0; j < steps; ++j) {
    DenseVector w = op(v.col(j));
    if (!w.allFinite()) {
      m = j;
      break;
    }
    const double w_norm = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i <= j; ++i) {
        const double coeff = v.col(i).dot(w);
        h(i, j) += coeff;
        w -= coeff * v.col(i);
      }
    }
    const double beta = w.norm();
    h(j + 1, j) = beta;
    if (beta <= 1e-12 * std::max(w_norm, h.topLeftCorner(j + 1, j + 1).norm())) {
      m = j + 1;
      break;
    }
    v.col(j + 1) = w / beta;
  }
  if (m == 0) return {};
  Eigen::EigenSolver<DenseMatrix> eig(DenseMatrix(h.topLeftCorner(m, m)), false);
  if (eig.info() != Eigen::Success) return {};
  std::vector<Complex> out;
  for (Index i = 0; i < m; ++i) out.push_back(eig.eigenvalues()(i));
  return out;
}

void add_unique(std::vector<Complex>& set, Complex z) {
  for (const Complex& w : set) {
    if (std::abs(w - z) <= 1e-10 * std::max(std::abs(w), std::abs(z))) return;
  }
  set.push_back(z);
}

// |prod_p (p - t) / (conj(p) + t)| over the selected shifts.
double adi_rational(const std::vector<Complex>& shifts, Complex t) {
  double value = 1.0;
  for (const Complex& p : shifts) value *= std::abs((p - t) / (std::conj(p) + t));
  return value;
}

void push_with_conjugate(std::vector<Complex>& shifts, Complex p) {
  if (p.imag() == 0.0) {
    shifts.push_back(p);
    return;
  }
  shifts.emplace_back(p.real(), std::abs(p.imag()));
  shifts.emplace_back(p.real(), -std::abs(p.imag()));
}

}  // namespace

std::vector<Complex> ritz_values(const Operator& a, const Operator& e, Index steps) {
  const Index n = a.rows();
  std::vector<Complex> out;
  if (n == 0 || steps < 1) return out;
  const Factorization<double> lu_e(e);
  const Apply forward = [&](const DenseVector& x) -> DenseVector {
    return lu_e.solve(a.apply<double>(DenseMatrix(x))).col(0);
  };
  for (const Complex& z : arnoldi_ritz(forward, n, steps)) add_unique(out, z);

  const Factorization<double> lu_a(a);
  const Apply inverse = [&](const DenseVector& x) -> DenseVector {
    return lu_a.solve(e.apply<double>(DenseMatrix(x))).col(0);
  };
  for (const Complex& z : arnoldi_ritz(inverse, n, std::max<Index>(steps / 2, 1))) {
    if (std::abs(z) > 0.0) add_unique(out, 1.0 / z);
  }
  return out;
}

ShiftSet adi_shifts(const Operator& a, const Operator& e, Index num_shifts, Index subspace_dim) {
  if (num_shifts < 1) throw Error(ErrorCode::kInvalidInput, "adi_shifts: num_shifts must be positive");
  if (subspace_dim < 1) throw Error(ErrorCode::kInvalidInput, "adi_shifts: subspace_dim must be positive");
  ShiftSet out;
  std::vector<Complex> candidates;
  for (Complex z : ritz_values(a, e, subspace_dim)) {
    if (z.real() > 0.0) z = -std::conj(z);
    if (z.real() < 0.0) {
      add_unique(candidates, z);
      add_unique(candidates, std::conj(z));
    }
  }
  if (candidates.empty()) {
    out.shifts.push_back(-1.0);
    out.note = "no usable Ritz values; single shift -1";
    return out;
  }
  // deterministic order of the candidate set
  std::sort(candidates.begin(), candidates.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() > y.imag();
  });

  // first shift: min over candidates of the max over the Ritz set
  Complex best = candidates.front();
  double best_value = std::numeric_limits<double>::infinity();
  for (const Complex& p : candidates) {
    std::vector<Complex> trial;
    push_with_conjugate(trial, p);
    double worst = 0.0;
    for (const Complex& t : candidates) worst = std::max(worst, adi_rational(trial, t));
    if (worst < best_value) {
      best_value = worst;
      best = p;
    }
  }
  push_with_conjugate(out.shifts, best);

  // then repeatedly add the Ritz value where the rational function is largest
  while (static_cast<Index>(out.shifts.size()) < num_shifts &&
         out.shifts.size() < candidates.size()) {
    Complex next = candidates.front();
    double worst = -1.0;
    for (const Complex& t : candidates) {
      const double value = adi_rational(out.shifts, t);
      if (value > worst) {
        worst = value;
        next = t;
      }
    }
    if (!(worst > 0.0)) break;
    if (next.imag() != 0.0 && static_cast<Index>(out.shifts.size()) + 2 > num_shifts) break;
    push_with_conjugate(out.shifts, next);
  }

  bool usable = !out.shifts.empty();
  for (const Complex& p : out.shifts) usable = usable && std::isfinite(std::abs(p)) && p.real() < 0.0;
  if (!usable) {
    Complex mean(0.0, 0.0);
    for (const Complex& z : candidates) mean += z;
    mean /= static_cast<double>(candidates.size());
    const double re = -std::abs(mean.real());
    out.shifts = {Complex(re < 0.0 ? re : -1.0, 0.0)};
    out.note = "shift selection failed; single shift at the Ritz mean";
  }
  return out;
}

LowRankFactor lr_adi(const Operator& a, const Operator& e, const DenseMatrix& b, const ShiftSet& shifts,
                     double res_tol, Index max_iter) {
  const Index n = a.rows();
  if (e.rows() != n || b.rows() != n) throw Error(ErrorCode::kDimensionMismatch, "lr_adi: dimensions");
  if (!(res_tol > 0)) throw Error(ErrorCode::kInvalidInput, "lr_adi: res_tol must be positive");
  if (shifts.shifts.empty()) throw Error(ErrorCode::kInvalidInput, "lr_adi: empty shift set");
  for (const Complex& p : shifts.shifts) {
    if (!(p.real() < 0.0)) throw Error(ErrorCode::kInvalidInput, "lr_adi: shifts need Re < 0");
  }

  LowRankFactor out;
  const double b_norm_sq = std::pow(b.norm() == 0.0 ? 0.0 : Eigen::JacobiSVD<DenseMatrix>(b).singularValues()(0), 2);
  out.z = DenseMatrix(n, 0);
  if (b_norm_sq == 0.0) return out;

  const std::size_t count = shifts.shifts.size();
  std::map<std::size_t, Factorization<double>> real_lu;
  std::map<std::size_t, Factorization<Complex>> complex_lu;
  std::vector<DenseMatrix> blocks;
  DenseMatrix w = b;
  const Index m = b.cols();
  std::size_t k = 0;
  while (out.iterations < max_iter) {
    const Complex p = shifts.shifts[k % count];
    const std::size_t key = k % count;
    if (p.imag() == 0.0) {
      auto it = real_lu.find(key);
      if (it == real_lu.end()) it = real_lu.emplace(key, Factorization<double>(a, 1.0, e, p.real())).first;
      const DenseMatrix v = it->second.solve(w);
      w -= 2.0 * p.real() * e.apply<double>(v);
      blocks.push_back(std::sqrt(-2.0 * p.real()) * v);
      out.iterations += 1;
      k += 1;
    } else {
      auto it = complex_lu.find(key);
      if (it == complex_lu.end()) {
        it = complex_lu.emplace(key, Factorization<Complex>(a, Complex(1.0), e, p)).first;
      }
      const ComplexMatrix v = it->second.solve(w.cast<Complex>());
      const double gamma = 2.0 * std::sqrt(-p.real());
      const double delta = p.real() / p.imag();
      const DenseMatrix re_part = v.real() + delta * v.imag();
      w += gamma * gamma * e.apply<double>(re_part);
      blocks.push_back(gamma * re_part);
      blocks.push_back(gamma * std::sqrt(delta * delta + 1.0) * DenseMatrix(v.imag()));
      out.iterations += 2;
      k += 2;  // the conjugate partner is covered
    }
    const double res = std::pow(Eigen::JacobiSVD<DenseMatrix>(w).singularValues()(0), 2) / b_norm_sq;
    out.residuals.push_back(res);
    if (res <= res_tol) break;
  }
  out.converged = !out.residuals.empty() && out.residuals.back() <= res_tol;
  out.z.resize(n, static_cast<Index>(blocks.size()) * m);
  for (std::size_t i = 0; i < blocks.size(); ++i) out.z.middleCols(static_cast<Index>(i) * m, m) = blocks[i];
  return out;
}

LowRankFactor lr_adi(const Operator& a, const Operator& e, const DenseMatrix& b, const AdiOptions& options) {
  const ShiftSet shifts = adi_shifts(a, e, options.num_shifts, options.subspace_dim);
  return lr_adi(a, e, b, shifts, options.res_tol, options.max_iter);
}

}  // namespace mor
