#pragma once

#include <span>

namespace gapgraph {

/// sum_i sin(k l_i) prod_{j != i} cos(k l_j): vanishes exactly at the nonzero
/// eigenvalues k^2 of the Laplacian on a star with Neumann leaves.
double star_secular_determinant(std::span<const double> lengths, double k);

struct SecularRoot {
  double k = 0.0;
  /// Root is a tangent pole shared by several edges rather than a zero of sum tan.
  bool degenerate_branch = false;
  int multiplicity = 1;
};

/// Smallest k > 0 with a star eigenvalue k^2 (q = 0, standard conditions).
/// Throws BracketingFailure.
SecularRoot star_secular_root(std::span<const double> lengths);

}  // namespace gapgraph
