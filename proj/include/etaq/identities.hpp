#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include <etaq/grid.hpp>
#include <etaq/spectrum.hpp>

namespace etaq {

/// Sup norms of the discrete Codazzi symmetry and the second-derivative
/// interchange identity for the shape tensor of a graph.  Both are evaluated
/// at nodes far enough inside the lattice that fourth-order difference
/// stencils of the height function fit (two layers in every axis).
struct CommutatorReport {
  double codazzi_sup = 0.0;
  double interchange_sup = 0.0;
  std::int64_t nodes_used = 0;
};

/// Checks, over the graph of u, that nabla h is fully symmetric and that the
/// iterated covariant derivatives of h satisfy the flat-ambient interchange
/// rule in each node's principal frame:
///   h_{ii;11} - h_{11;ii} - kappa_1 kappa_i^2 + kappa_1^2 kappa_i = 0
/// with E_1 the direction of the largest principal curvature.
CommutatorReport verify_commutator(const GridField& u);

/// Second covariant derivative of the second fundamental form at one node,
/// contracted in the g-orthonormal principal frame with kappa descending:
/// entry (i, j) = (nabla_{E_j} nabla_{E_j} h)(E_i, E_i).
Eigen::MatrixXd shape_hessian_diagonal(const GridField& u, std::int64_t node);

/// Residual of the differentiated-equation identity for the normal height
/// nu = 1/W on the graph of u with manufactured right-hand side
/// f(x) = quotient(op, kappa(x)):
///   sum_a F^a [ (nabla^2 nu)(E_a, E_a) + kappa_a^2 nu ] + g^{ab} d_a f u_b,
/// the last term being <surface gradient of f, e_{n+1}> with its sign flipped.
struct SuwReport {
  double residual_sup = 0.0;
  std::int64_t nodes_used = 0;
  bool regularized = false;
};

/// kappa_shift > 0 adds a multiple of the identity to the curvature spectrum
/// before forming f and F^a, regularizing flat graphs whose kappa leaves the
/// admissible cone; the report flags when the shift was applied.
SuwReport verify_suw_identity(const GridField& u, const QuotientOp& op,
                              double kappa_shift = 0.0);

}  // namespace etaq
