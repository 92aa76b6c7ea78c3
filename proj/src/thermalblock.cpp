#include "mor/thermalblock.hpp"

#include <vector>

namespace mor::thermalblock {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Index block_of(const Spec& spec, Index node) {
  const Index g = spec.grid_points_per_side;
  const Index side = g / spec.blocks_per_side;
  const Index ix = node % g;
  const Index iy = node / g;
  return (iy / side) * spec.blocks_per_side + ix / side;
}

// Calls visit(p, q) for every stencil edge; q = -1 marks an edge to the
// Dirichlet boundary.
template <typename Visit>
void for_each_edge(const Spec& spec, Visit&& visit) {
  const Index g = spec.grid_points_per_side;
  for (Index iy = 0; iy < g; ++iy) {
    for (Index ix = 0; ix < g; ++ix) {
      const Index p = iy * g + ix;
      if (ix + 1 < g) visit(p, p + 1);
      if (iy + 1 < g) visit(p, p + g);
      if (ix == 0) visit(p, Index{-1});
      if (ix == g - 1) visit(p, Index{-1});
      if (iy == 0) visit(p, Index{-1});
      if (iy == g - 1) visit(p, Index{-1});
    }
  }
}

void add_edge(Triplets& t, Index p, Index q, double kappa) {
  t.emplace_back(p, p, -kappa);
  if (q < 0) return;
  t.emplace_back(q, q, -kappa);
  t.emplace_back(p, q, kappa);
  t.emplace_back(q, p, kappa);
}

SparseMatrix from_triplets(Index n, const Triplets& t) {
  SparseMatrix s(n, n);
  s.setFromTriplets(t.begin(), t.end());
  s.makeCompressed();
  return s;
}

std::vector<SparseMatrix> block_terms(const Spec& spec) {
  const Index n = spec.order();
  std::vector<Triplets> parts(static_cast<std::size_t>(spec.num_blocks()));
  for_each_edge(spec, [&](Index p, Index q) {
    const Index bp = block_of(spec, p);
    if (q < 0) {
      add_edge(parts[static_cast<std::size_t>(bp)], p, q, 1.0);
      return;
    }
    const Index bq = block_of(spec, q);
    if (bp == bq) {
      add_edge(parts[static_cast<std::size_t>(bp)], p, q, 1.0);
    } else {
      add_edge(parts[static_cast<std::size_t>(bp)], p, q, 0.5);
      add_edge(parts[static_cast<std::size_t>(bq)], p, q, 0.5);
    }
  });
  std::vector<SparseMatrix> out;
  for (const auto& t : parts) out.push_back(from_triplets(n, t));
  return out;
}

DenseMatrix output_matrix(const Spec& spec) {
  const Index n = spec.order();
  if (spec.output_mode == OutputMode::kDomainAverage) {
    return DenseMatrix::Constant(1, n, 1.0 / static_cast<double>(n));
  }
  const Index d = spec.num_blocks();
  DenseMatrix c = DenseMatrix::Zero(d, n);
  const double per_block = static_cast<double>(n / d);
  for (Index node = 0; node < n; ++node) c(block_of(spec, node), node) = 1.0 / per_block;
  return c;
}

LtiModel assemble(const Spec& spec, AffineMatrix a) {
  const Index n = spec.order();
  const double h = 1.0 / static_cast<double>(spec.grid_points_per_side + 1);
  SparseMatrix e(n, n);
  e.setIdentity();
  e *= h * h;
  SparseMatrix energy = -affine_eval(a, Parameter::ones(a.num_parameters())).to_sparse();
  energy.prune(0.0);
  return LtiModel(Operator(std::move(e)), std::move(a), DenseMatrix::Constant(n, 1, h * h),
                  output_matrix(spec), InnerProduct(Operator(std::move(energy))));
}

}  // namespace

void validate(const Spec& spec) {
  const Index k = spec.blocks_per_side;
  const Index g = spec.grid_points_per_side;
  if (k < 1 || g < k || g % k != 0) {
    throw Error(ErrorCode::kInvalidInput, "thermal block: need k >= 1, g >= k and g divisible by k (k=" +
                                              std::to_string(k) + ", g=" + std::to_string(g) + ")");
  }
}

LtiModel build(const Spec& spec) {
  validate(spec);
  std::vector<Operator> terms;
  for (auto& s : block_terms(spec)) terms.emplace_back(std::move(s));
  return assemble(spec, AffineMatrix(Operator::zero(spec.order(), spec.order()), std::move(terms)));
}

SparseMatrix assemble_monolithic(const Spec& spec, const Parameter& mu) {
  validate(spec);
  if (mu.size() != spec.num_blocks()) {
    throw Error(ErrorCode::kDimensionMismatch, "thermal block: parameter length must equal k^2");
  }
  Triplets t;
  for_each_edge(spec, [&](Index p, Index q) {
    const double kp = mu[block_of(spec, p)];
    const double kappa = q < 0 ? kp : 0.5 * (kp + mu[block_of(spec, q)]);
    add_edge(t, p, q, kappa);
  });
  return from_triplets(spec.order(), t);
}

double verify_affine_consistency(const Spec& spec, const Parameter& mu) {
  const LtiModel model = build(spec);
  const DenseMatrix diff =
      DenseMatrix(assemble_monolithic(spec, mu)) - model.a_at(mu).to_dense();
  return diff.size() == 0 ? 0.0 : diff.cwiseAbs().maxCoeff();
}

LtiModel build_one_parameter(const Spec& spec, Index varying_block) {
  validate(spec);
  if (varying_block < 0 || varying_block >= spec.num_blocks()) {
    throw Error(ErrorCode::kInvalidInput, "thermal block: varying block out of range");
  }
  const auto terms = block_terms(spec);
  SparseMatrix background(spec.order(), spec.order());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (static_cast<Index>(i) != varying_block) background += terms[i];
  }
  std::vector<Operator> varying{Operator(terms[static_cast<std::size_t>(varying_block)])};
  return assemble(spec, AffineMatrix(Operator(std::move(background)), std::move(varying)));
}

}  // namespace mor::thermalblock
