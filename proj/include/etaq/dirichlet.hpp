#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <string>
#include <vector>

#include <etaq/eta_operator.hpp>
#include <etaq/expression.hpp>
#include <etaq/grid.hpp>
#include <etaq/spectrum.hpp>

namespace etaq {

/// How Dirichlet data is sampled for ring nodes of a ball: at the radial
/// projection of the node onto the sphere (default, first-order boundary
/// error), or at the node itself (exact for manufactured solutions whose
/// boundary expression extends inside).  Box ring nodes lie on the boundary,
/// so the modes coincide there.
enum class BoundaryMode { Projection, Node };

/// Prescribed-quotient Dirichlet problem on a grid: find u with
///   sigma_k/sigma_l(spectrum(theta*tr(D2u)*I - mu*D2u + chi)) = rhs(x, u, Du)
/// in the domain and u = boundary(x) on the ring.  Expressions may use
/// x1..xn, u, p1..pn, and the shorthand r = |x|.
struct DirichletProblem {
  QuotientOp op;
  EtaParams params;
  DomainSpec domain;
  Eigen::VectorXi npts;
  expr::Expression rhs;
  expr::Expression boundary;
  BoundaryMode boundary_mode = BoundaryMode::Projection;
};

struct ResidualReport {
  /// Pointwise residual on the full lattice, zero off the interior.  Nodes
  /// whose transform leaves the cone get the most negative failing
  /// sigma_j minus the rhs, a sign-correct penalty for line searches.
  Eigen::VectorXd residual;
  double sup = 0.0;
  std::int64_t inadmissible = 0;
  /// Smallest sigma_j(lambda), j <= k, seen over interior nodes.
  double min_cone_margin = 0.0;
  double min_rhs = 0.0;
};

ResidualReport residual(const DirichletProblem& prob, const GridField& u);

/// Analytic Jacobian of the interior residual with respect to interior node
/// values, rows and columns ordered as u.interior_nodes().  Requires an
/// admissible iterate.
Eigen::SparseMatrix<double> residual_jacobian(const DirichletProblem& prob,
                                              const GridField& u);

/// Evaluates the boundary expression onto the ring nodes in place.
void impose_boundary(const DirichletProblem& prob, GridField& u);

/// Default Newton start: the quadratic bowl A*(|x - c|^2 - R^2)/2 whose
/// transform solves the constant equation with the geometric-mean rhs
/// (sampled at u = 0, Du = 0), boundary data imposed on top.  R is the
/// circumradius for boxes.
struct BowlInit {
  GridField field;
  double amplitude = 0.0;
  double rhs_scale = 0.0;
};

BowlInit initial_bowl(const DirichletProblem& prob);

struct SolveConfig {
  int max_iterations = 50;
  /// Convergence once sup-residual <= tolerance_factor * rhs scale.
  double tolerance_factor = 1e-10;
  /// Line search rejects trial iterates whose cone margin drops below this.
  double cone_margin = 1e-12;
  double min_step = 1e-8;
  /// Exponent for the depth-weighted curvature monitor recorded per iterate.
  double monitor_beta = 2.0;
};

struct IterationRecord {
  int iteration = 0;
  double homotopy_t = 1.0;
  double residual_sup = 0.0;
  double step = 0.0;
  double cone_margin = 0.0;
  MonitorReport monitors;
};

struct SolveDiagnostics {
  std::vector<IterationRecord> history;
  bool converged = false;
  double final_residual = 0.0;
  int iterations = 0;
};

struct SolveResult {
  GridField field;
  SolveDiagnostics diagnostics;
};

/// Damped Newton with the analytic Jacobian and a direct sparse
/// factorization.  Steps halve until the trial iterate stays admissible and
/// strictly reduces the sup-residual; a stalled search or an exhausted
/// iteration budget raises nonconvergence_error, a nonpositive rhs raises
/// positivity_error.
SolveResult newton_solve(const DirichletProblem& prob, const SolveConfig& config = {});
SolveResult newton_solve(const DirichletProblem& prob, GridField start,
                         const SolveConfig& config = {});

struct ContinuationConfig {
  /// Homotopy (1-t)*f0 + t*rhs from the constant mean f0 in equal steps.
  int steps = 10;
  /// Failed legs halve the increment until it would drop below this.
  double min_dt = 1.0 / 160.0;
  SolveConfig solve;
};

/// Solves the rhs homotopy starting from the quadratic bowl, reusing each
/// leg's solution as the next start.
SolveResult continuation_solve(const DirichletProblem& prob,
                               const ContinuationConfig& config = {});

std::string diagnostics_to_csv(const SolveDiagnostics& diag);

}  // namespace etaq
