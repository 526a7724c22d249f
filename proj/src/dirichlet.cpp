#include <etaq/dirichlet.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <etaq/csv.hpp>
#include <etaq/symfunc.hpp>

namespace etaq {

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b *= static_cast<double>(n - k + i) / i;
  return b;
}

void check_problem(const DirichletProblem& prob) {
  const int n = prob.domain.dim();
  if (prob.op.n != n) {
    throw input_error("dirichlet: operator dimension does not match the domain");
  }
  if (prob.params.has_chi() &&
      (prob.params.chi.rows() != n || prob.params.chi.cols() != n)) {
    throw input_error("dirichlet: chi dimension does not match the domain");
  }
}

/// rhs along the homotopy (1-t)*f0 + t*f, with the u- and p-derivative
/// expressions differentiated once up front.
struct RhsPack {
  explicit RhsPack(const DirichletProblem& prob)
      : rhs(&prob.rhs), du(expr::derivative(prob.rhs, "u")) {
    for (int a = 0; a < prob.domain.dim(); ++a) {
      dp.push_back(expr::derivative(prob.rhs, "p" + std::to_string(a + 1)));
    }
  }

  static expr::EvalContext context(const Eigen::VectorXd& x, double u,
                                   const Eigen::VectorXd& p) {
    expr::EvalContext ctx;
    ctx.bind_x(x);
    ctx.bind_u(u);
    ctx.bind_p(p);
    ctx.bind_r(x.norm());
    return ctx;
  }

  double value(const Eigen::VectorXd& x, double u, const Eigen::VectorXd& p) const {
    const double f = rhs->eval(context(x, u, p));
    return (1.0 - t) * f0 + t * f;
  }
  double value_du(const Eigen::VectorXd& x, double u, const Eigen::VectorXd& p) const {
    return t * du.eval(context(x, u, p));
  }
  double value_dp(int a, const Eigen::VectorXd& x, double u,
                  const Eigen::VectorXd& p) const {
    return t * dp[static_cast<std::size_t>(a)].eval(context(x, u, p));
  }

  const expr::Expression* rhs;
  expr::Expression du;
  std::vector<expr::Expression> dp;
  double t = 1.0;
  double f0 = 0.0;
};

ResidualReport residual_impl(const DirichletProblem& prob, const RhsPack& pack,
                             const GridField& u) {
  const int k = prob.op.k;
  const int l = prob.op.l;
  ResidualReport rep;
  rep.residual = Eigen::VectorXd::Zero(u.size());
  rep.min_cone_margin = std::numeric_limits<double>::infinity();
  rep.min_rhs = std::numeric_limits<double>::infinity();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (std::int64_t id : u.interior_nodes()) {
    const NodeDerivatives d = discretize(u, id);
    const Eigen::MatrixXd U = eta_matrix(prob.params, d.hess);
    eig.compute(U, Eigen::EigenvaluesOnly);
    const ConeReport cone = cone_contains(k, eig.eigenvalues());
    const double margin = cone.sigmas.minCoeff();
    rep.min_cone_margin = std::min(rep.min_cone_margin, margin);

    const double f = pack.value(u.node_position(id), u.value(id), d.grad);
    rep.min_rhs = std::min(rep.min_rhs, f);

    double q;
    if (cone.contained) {
      q = cone.sigmas(k - 1) / (l >= 1 ? cone.sigmas(l - 1) : 1.0);
    } else {
      ++rep.inadmissible;
      q = margin;  // most negative failing sigma_j, a sign-correct penalty
    }
    rep.residual(id) = q - f;
    rep.sup = std::max(rep.sup, std::abs(rep.residual(id)));
  }
  if (u.interior_nodes().empty()) {
    rep.min_cone_margin = 0.0;
    rep.min_rhs = 0.0;
  }
  return rep;
}

Eigen::SparseMatrix<double> jacobian_impl(const DirichletProblem& prob,
                                          const RhsPack& pack, const GridField& u) {
  const int n = u.dim();
  const double h = u.spacing();
  const auto& interior = u.interior_nodes();
  std::vector<std::int64_t> unknown(static_cast<std::size_t>(u.size()), -1);
  for (std::size_t i = 0; i < interior.size(); ++i) {
    unknown[static_cast<std::size_t>(interior[i])] = static_cast<std::int64_t>(i);
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(interior.size() * static_cast<std::size_t>(1 + 2 * n + 2 * n * (n - 1)));
  auto add = [&](std::int64_t row, std::int64_t node, double w) {
    const std::int64_t col = unknown[static_cast<std::size_t>(node)];
    if (col >= 0) {
      trips.emplace_back(static_cast<int>(row), static_cast<int>(col), w);
    }
  };

  for (std::size_t i = 0; i < interior.size(); ++i) {
    const std::int64_t id = interior[i];
    const std::int64_t row = static_cast<std::int64_t>(i);
    const NodeDerivatives d = discretize(u, id);
    const OperatorEval ev = evaluate(prob.op, prob.params, d.hess);

    const Eigen::VectorXd x = u.node_position(id);
    const double fu = pack.value_du(x, u.value(id), d.grad);

    double center = -fu;
    for (int a = 0; a < n; ++a) center += ev.f_first(a, a) * (-2.0 / (h * h));
    add(row, id, center);

    for (int a = 0; a < n; ++a) {
      const double fp = pack.value_dp(a, x, u.value(id), d.grad);
      const std::int64_t ap = u.neighbor(id, a, 1);
      const std::int64_t am = u.neighbor(id, a, -1);
      add(row, ap, ev.f_first(a, a) / (h * h) - fp / (2.0 * h));
      add(row, am, ev.f_first(a, a) / (h * h) + fp / (2.0 * h));
      // Both symmetric slots of the cross difference move together.
      for (int b = a + 1; b < n; ++b) {
        for (int da : {-1, 1}) {
          for (int db : {-1, 1}) {
            const std::int64_t nb = u.neighbor(u.neighbor(id, a, da), b, db);
            add(row, nb, ev.f_first(a, b) * da * db / (2.0 * h * h));
          }
        }
      }
    }
  }

  Eigen::SparseMatrix<double> jac(static_cast<int>(interior.size()),
                                  static_cast<int>(interior.size()));
  jac.setFromTriplets(trips.begin(), trips.end());
  return jac;
}

double rhs_scale_at_rest(const RhsPack& pack,
                         const GridField& u) {
  const Eigen::VectorXd p0 = Eigen::VectorXd::Zero(u.dim());
  double scale = 0.0;
  for (std::int64_t id : u.interior_nodes()) {
    const double f = pack.value(u.node_position(id), 0.0, p0);
    if (!(f > 0.0)) {
      throw positivity_error("dirichlet: rhs must be positive (value " +
                             std::to_string(f) + " at a rest state)");
    }
    scale = std::max(scale, f);
  }
  return std::max(scale, std::numeric_limits<double>::min());
}

/// Shared driver; on success returns the converged state and appends history.
GridField newton_driver(const DirichletProblem& prob, const RhsPack& pack,
                        GridField state, const SolveConfig& config,
                        SolveDiagnostics& diag) {
  const double scale = rhs_scale_at_rest(pack, state);
  const double tol = config.tolerance_factor * scale;

  ResidualReport rep = residual_impl(prob, pack, state);
  if (rep.inadmissible > 0 || !(rep.min_cone_margin > 0.0)) {
    throw admissibility_error("dirichlet: initial iterate leaves the cone", 0,
                              rep.min_cone_margin);
  }
  if (!(rep.min_rhs > 0.0)) {
    throw positivity_error("dirichlet: rhs nonpositive at the initial iterate");
  }
  diag.history.push_back({diag.iterations, pack.t, rep.sup, 0.0, rep.min_cone_margin,
                          monitor_estimates(state, config.monitor_beta)});

  const auto& interior = state.interior_nodes();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;

  for (int it = 1; it <= config.max_iterations; ++it) {
    if (rep.sup <= tol) {
      diag.converged = true;
      diag.final_residual = rep.sup;
      return state;
    }

    const Eigen::SparseMatrix<double> jac = jacobian_impl(prob, pack, state);
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) {
      throw nonconvergence_error("dirichlet: jacobian factorization failed");
    }
    Eigen::VectorXd r(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i) r(i) = rep.residual(interior[i]);
    const Eigen::VectorXd delta = lu.solve(-r);

    double step = 1.0;
    for (;;) {
      GridField trial = state;
      for (std::size_t i = 0; i < interior.size(); ++i) {
        trial.set_value(interior[i], state.value(interior[i]) + step * delta(i));
      }
      ResidualReport trial_rep = residual_impl(prob, pack, trial);
      const bool ok = std::isfinite(trial_rep.sup) && trial_rep.inadmissible == 0 &&
                      trial_rep.min_cone_margin >= config.cone_margin &&
                      trial_rep.min_rhs > 0.0 && trial_rep.sup < rep.sup;
      if (ok) {
        state = std::move(trial);
        rep = std::move(trial_rep);
        break;
      }
      step *= 0.5;
      if (step < config.min_step) {
        throw nonconvergence_error(
            "dirichlet: line search stalled at residual " + std::to_string(rep.sup));
      }
    }
    ++diag.iterations;
    diag.history.push_back({diag.iterations, pack.t, rep.sup, step,
                            rep.min_cone_margin,
                            monitor_estimates(state, config.monitor_beta)});
  }

  if (rep.sup <= tol) {
    diag.converged = true;
    diag.final_residual = rep.sup;
    return state;
  }
  throw nonconvergence_error("dirichlet: iteration budget exhausted at residual " +
                             std::to_string(rep.sup));
}

double geometric_mean_rhs(const GridField& grid,
                          const RhsPack& pack) {
  const Eigen::VectorXd p0 = Eigen::VectorXd::Zero(grid.dim());
  double log_sum = 0.0;
  std::int64_t count = 0;
  for (std::int64_t id : grid.interior_nodes()) {
    const double f = pack.value(grid.node_position(id), 0.0, p0);
    if (!(f > 0.0)) {
      throw positivity_error("dirichlet: rhs must be positive (value " +
                             std::to_string(f) + " at a rest state)");
    }
    log_sum += std::log(f);
    ++count;
  }
  if (count == 0) throw input_error("dirichlet: grid has no interior nodes");
  return std::exp(log_sum / static_cast<double>(count));
}

}  // namespace

ResidualReport residual(const DirichletProblem& prob, const GridField& u) {
  check_problem(prob);
  RhsPack pack(prob);
  return residual_impl(prob, pack, u);
}

Eigen::SparseMatrix<double> residual_jacobian(const DirichletProblem& prob,
                                              const GridField& u) {
  check_problem(prob);
  RhsPack pack(prob);
  return jacobian_impl(prob, pack, u);
}

void impose_boundary(const DirichletProblem& prob, GridField& u) {
  check_problem(prob);
  const bool project = prob.boundary_mode == BoundaryMode::Projection &&
                       prob.domain.kind == DomainKind::Ball;
  for (std::int64_t id : u.ring_nodes()) {
    Eigen::VectorXd x = u.node_position(id);
    if (project) {
      const Eigen::VectorXd offset = x - prob.domain.center;
      const double norm = offset.norm();
      if (norm > 1e-300) {
        x = prob.domain.center + (prob.domain.radius / norm) * offset;
      }
    }
    expr::EvalContext ctx;
    ctx.bind_x(x);
    ctx.bind_r(x.norm());
    u.set_value(id, prob.boundary.eval(ctx));
  }
}

BowlInit initial_bowl(const DirichletProblem& prob) {
  check_problem(prob);
  GridField field(prob.domain, prob.npts);
  RhsPack pack(prob);
  const double mean = geometric_mean_rhs(field, pack);

  const int n = prob.op.n;
  const int k = prob.op.k;
  const int l = prob.op.l;
  const double level =
      std::pow(mean * binomial(n, l) / binomial(n, k), 1.0 / static_cast<double>(k - l));
  const double amplitude = level / (prob.params.theta * n - prob.params.mu);

  Eigen::VectorXd lo, hi;
  prob.domain.hull(lo, hi);
  const Eigen::VectorXd center = 0.5 * (lo + hi);
  const double radius = prob.domain.kind == DomainKind::Ball
                            ? prob.domain.radius
                            : 0.5 * (hi - lo).norm();
  field.fill([&](const Eigen::VectorXd& x) {
    return amplitude * ((x - center).squaredNorm() - radius * radius) / 2.0;
  });
  impose_boundary(prob, field);
  return BowlInit{std::move(field), amplitude, mean};
}

SolveResult newton_solve(const DirichletProblem& prob, const SolveConfig& config) {
  return newton_solve(prob, initial_bowl(prob).field, config);
}

SolveResult newton_solve(const DirichletProblem& prob, GridField start,
                         const SolveConfig& config) {
  check_problem(prob);
  impose_boundary(prob, start);
  RhsPack pack(prob);
  SolveDiagnostics diag;
  GridField solved = newton_driver(prob, pack, std::move(start), config, diag);
  diag.final_residual = diag.history.back().residual_sup;
  return SolveResult{std::move(solved), std::move(diag)};
}

SolveResult continuation_solve(const DirichletProblem& prob,
                               const ContinuationConfig& config) {
  check_problem(prob);
  if (config.steps < 1) throw input_error("continuation: steps must be positive");

  BowlInit bowl = initial_bowl(prob);
  RhsPack pack(prob);
  pack.f0 = bowl.rhs_scale;

  SolveDiagnostics diag;
  GridField state = std::move(bowl.field);

  pack.t = 0.0;
  state = newton_driver(prob, pack, std::move(state), config.solve, diag);

  double t = 0.0;
  double dt = 1.0 / static_cast<double>(config.steps);
  while (t < 1.0 - 1e-14) {
    const double t_next = std::min(1.0, t + dt);
    pack.t = t_next;
    try {
      GridField advanced = newton_driver(prob, pack, state, config.solve, diag);
      state = std::move(advanced);
      t = t_next;
    } catch (const nonconvergence_error&) {
      dt *= 0.5;
      if (dt < config.min_dt) throw;
    }
  }
  diag.converged = true;
  diag.final_residual = diag.history.back().residual_sup;
  return SolveResult{std::move(state), std::move(diag)};
}

std::string diagnostics_to_csv(const SolveDiagnostics& diag) {
  csv::Writer w;
  w.line("iteration,homotopy_t,residual_sup,step,cone_margin,global_sup,interior_sup,pogorelov_sup");
  for (const IterationRecord& rec : diag.history) {
    w.cell(static_cast<std::int64_t>(rec.iteration));
    w.cell(rec.homotopy_t);
    w.cell(rec.residual_sup);
    w.cell(rec.step);
    w.cell(rec.cone_margin);
    w.cell(rec.monitors.global_sup);
    w.cell(rec.monitors.interior_sup);
    w.cell(rec.monitors.pogorelov_sup);
    w.endrow();
  }
  return w.str();
}

}  // namespace etaq
