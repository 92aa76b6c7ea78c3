#pragma once

#include "mor/model.hpp"

namespace mor::thermalblock {

enum class OutputMode { kBlockAverages, kDomainAverage };

struct Spec {
  Index blocks_per_side = 2;        // k, d = k^2
  Index grid_points_per_side = 30;  // g interior nodes per side, g % k == 0
  OutputMode output_mode = OutputMode::kBlockAverages;

  Index num_blocks() const { return blocks_per_side * blocks_per_side; }
  Index order() const { return grid_points_per_side * grid_points_per_side; }
};

void validate(const Spec& spec);

/// Finite-difference heat equation on the unit square with k x k conductivity
/// blocks. Nodes are numbered row by row (index = iy * g + ix), blocks the
/// same way (index = by * k + bx). E = h^2 I, B = h^2 * ones, and every
/// stencil edge is split between the parametric terms of the blocks at its
/// two ends, so A0 = 0 and A(mu) is the monolithic assembly with the
/// arithmetic mean of neighbouring conductivities on interface edges.
LtiModel build(const Spec& spec);

/// Direct assembly of A(mu) from the edge conductivities, independent of the
/// affine terms.
SparseMatrix assemble_monolithic(const Spec& spec, const Parameter& mu);

/// Max entrywise difference between assemble_monolithic and affine_eval.
double verify_affine_consistency(const Spec& spec, const Parameter& mu);

/// d = 1 variant: A(mu) = A_bg + mu * A_var where A_var is the parametric
/// term of `varying_block` and A_bg collects every other block at unit
/// conductivity. Same E, B, C and energy product as build().
LtiModel build_one_parameter(const Spec& spec, Index varying_block = 0);

}  // namespace mor::thermalblock
