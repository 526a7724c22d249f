#include <doctest.h>

#include <cmath>
#include <cstdint>

#include <etaq/dirichlet.hpp>
#include <etaq/errors.hpp>

using etaq::BoundaryMode;
using etaq::DirichletProblem;
using etaq::DomainSpec;
using etaq::EtaParams;
using etaq::GridField;
using etaq::QuotientOp;
using etaq::expr::parse_expression;

namespace {

Eigen::VectorXi pts(int n, int count) {
  return Eigen::VectorXi::Constant(n, count);
}

DirichletProblem unit_ball_21(const std::string& rhs, const std::string& bdry,
                              int npts, BoundaryMode mode) {
  return DirichletProblem{QuotientOp(3, 2, 1),
                          EtaParams(1.0, 1.0),
                          DomainSpec::ball(Eigen::VectorXd::Zero(3), 1.0),
                          pts(3, npts),
                          parse_expression(rhs),
                          parse_expression(bdry),
                          mode};
}

double sup_error(const GridField& u,
                 const std::function<double(const Eigen::VectorXd&)>& exact) {
  double e = 0.0;
  for (std::int64_t id : u.interior_nodes()) {
    e = std::max(e, std::abs(u.value(id) - exact(u.node_position(id))));
  }
  return e;
}

}  // namespace

TEST_SUITE_BEGIN("dirichlet");

TEST_CASE("residual vanishes on the quadratic bowl") {
  auto prob = unit_ball_21("2", "(x1^2 + x2^2 + x3^2 - 1)/2", 9, BoundaryMode::Node);
  GridField u(prob.domain, prob.npts);
  u.fill([](const Eigen::VectorXd& x) { return x.squaredNorm() / 2.0; });

  auto rep = etaq::residual(prob, u);
  CHECK(rep.sup < 1e-12);
  CHECK(rep.inadmissible == 0);
  // U = 2 I there, so sigma_1 = 6 is the binding cone margin.
  CHECK(rep.min_cone_margin == doctest::Approx(6.0).epsilon(1e-10));
  CHECK(rep.min_rhs == doctest::Approx(2.0));
}

TEST_CASE("residual picks up an anisotropic quadratic exactly") {
  // W = diag(1,1,2) gives transformed spectrum (2,3,3): quotient 21/8.
  auto prob = unit_ball_21("2", "0", 9, BoundaryMode::Node);
  GridField u(prob.domain, prob.npts);
  u.fill([](const Eigen::VectorXd& x) {
    return (x(0) * x(0) + x(1) * x(1) + 2.0 * x(2) * x(2)) / 2.0;
  });

  auto rep = etaq::residual(prob, u);
  for (std::int64_t id : u.interior_nodes()) {
    CHECK(rep.residual(id) == doctest::Approx(21.0 / 8.0 - 2.0).epsilon(1e-12));
  }
}

TEST_CASE("inadmissible states report the failing symmetric function") {
  auto prob = unit_ball_21("1", "0", 9, BoundaryMode::Node);
  GridField u(prob.domain, prob.npts);  // u = 0 everywhere

  auto rep = etaq::residual(prob, u);
  CHECK(rep.inadmissible == static_cast<std::int64_t>(u.interior_nodes().size()));
  CHECK(rep.min_cone_margin == doctest::Approx(0.0));
  for (std::int64_t id : u.interior_nodes()) {
    CHECK(rep.residual(id) == doctest::Approx(-1.0));
  }
}

TEST_CASE("nonpositive rhs stops the solver") {
  auto prob = unit_ball_21("-1", "0", 9, BoundaryMode::Projection);
  CHECK_THROWS_AS(etaq::newton_solve(prob), etaq::positivity_error);
}

TEST_CASE("assembled jacobian matches finite differences") {
  DirichletProblem prob{QuotientOp(2, 2, 1),
                        EtaParams(1.0, 1.0),
                        DomainSpec::box(Eigen::Vector2d(-0.6, -0.6),
                                        Eigen::Vector2d(0.6, 0.6)),
                        pts(2, 7),
                        parse_expression("2 + 0.1*u + 0.05*p1 + 0.02*p2^2"),
                        parse_expression("0"),
                        BoundaryMode::Node};
  GridField u(prob.domain, prob.npts);
  u.fill([](const Eigen::VectorXd& x) {
    return x.squaredNorm() / 2.0 + 0.03 * x(0) * x(0) * x(0) + 0.02 * x(0) * x(1);
  });

  const Eigen::SparseMatrix<double> jac = etaq::residual_jacobian(prob, u);
  const auto& interior = u.interior_nodes();
  REQUIRE(jac.rows() == static_cast<Eigen::Index>(interior.size()));

  const double step = 1e-6;
  for (std::size_t col = 0; col < interior.size(); col += 7) {
    GridField up = u;
    GridField um = u;
    up.set_value(interior[col], u.value(interior[col]) + step);
    um.set_value(interior[col], u.value(interior[col]) - step);
    const Eigen::VectorXd rp = etaq::residual(prob, up).residual;
    const Eigen::VectorXd rm = etaq::residual(prob, um).residual;
    for (std::size_t row = 0; row < interior.size(); ++row) {
      const double fd = (rp(interior[row]) - rm(interior[row])) / (2.0 * step);
      const double an = jac.coeff(static_cast<Eigen::Index>(row),
                                  static_cast<Eigen::Index>(col));
      CHECK(an == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("newton accepts a manufactured fixed point immediately") {
  auto prob = unit_ball_21("2", "(x1^2 + x2^2 + x3^2)/2", 17, BoundaryMode::Node);
  GridField start(prob.domain, prob.npts);
  start.fill([](const Eigen::VectorXd& x) { return x.squaredNorm() / 2.0; });

  auto result = etaq::newton_solve(prob, start);
  CHECK(result.diagnostics.converged);
  CHECK(result.diagnostics.iterations <= 1);
  CHECK(result.diagnostics.final_residual < 1e-12);
  CHECK(sup_error(result.field,
                  [](const Eigen::VectorXd& x) { return x.squaredNorm() / 2.0; }) <
        1e-12);
}

TEST_CASE("default start solves the constant problem exactly") {
  // theta*n - mu = 2 and mean rhs 2 make the bowl (|x|^2 - 1)/2 with unit
  // amplitude, which already satisfies the discrete equation.
  auto prob = unit_ball_21("2", "(x1^2 + x2^2 + x3^2 - 1)/2", 9, BoundaryMode::Node);
  auto bowl = etaq::initial_bowl(prob);
  CHECK(bowl.amplitude == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bowl.rhs_scale == doctest::Approx(2.0).epsilon(1e-12));

  auto result = etaq::newton_solve(prob);
  CHECK(result.diagnostics.converged);
  CHECK(sup_error(result.field, [](const Eigen::VectorXd& x) {
          return (x.squaredNorm() - 1.0) / 2.0;
        }) < 1e-12);
}

TEST_CASE("boundary projection evaluates data on the sphere") {
  auto prob = unit_ball_21("2", "x1", 9, BoundaryMode::Projection);
  GridField u(prob.domain, prob.npts);
  etaq::impose_boundary(prob, u);
  for (std::int64_t id : u.ring_nodes()) {
    const Eigen::VectorXd x = u.node_position(id);
    CHECK(u.value(id) == doctest::Approx(x(0) / x.norm()).epsilon(1e-12));
  }
}

TEST_CASE("manufactured solve converges at second order") {
  auto problem_at = [](int npts) {
    return DirichletProblem{QuotientOp(2, 1, 0),
                            EtaParams(1.0, 1.0),
                            DomainSpec::box(Eigen::Vector2d(-1, -1),
                                            Eigen::Vector2d(1, 1)),
                            pts(2, npts),
                            parse_expression("2 + 2*(x1^2 + x2^2)"),
                            parse_expression("(x1^2 + x2^2)/2 + (x1^2 + x2^2)^2/8"),
                            BoundaryMode::Node};
  };
  auto exact = [](const Eigen::VectorXd& x) {
    const double s = x.squaredNorm();
    return s / 2.0 + s * s / 8.0;
  };

  auto coarse = etaq::newton_solve(problem_at(9));
  auto fine = etaq::newton_solve(problem_at(17));
  REQUIRE(coarse.diagnostics.converged);
  REQUIRE(fine.diagnostics.converged);

  const double ec = sup_error(coarse.field, exact);
  const double ef = sup_error(fine.field, exact);
  CHECK(ec / ef > 3.0);
  CHECK(ec / ef < 5.0);

  // Damped steps must make strict progress, inside the cone with margin.
  const auto& hist = fine.diagnostics.history;
  REQUIRE(hist.size() >= 2);
  for (std::size_t i = 1; i < hist.size(); ++i) {
    CHECK(hist[i].residual_sup < hist[i - 1].residual_sup);
    CHECK(hist[i].cone_margin >= 1e-12);
    CHECK(hist[i].monitors.global_sup > 0.0);
  }
}

TEST_CASE("gradient-dependent rhs still converges") {
  auto prob = unit_ball_21("2 + 0.1*(p1^2 + p2^2 + p3^2)", "0", 9,
                           BoundaryMode::Projection);
  auto result = etaq::newton_solve(prob);
  CHECK(result.diagnostics.converged);
  CHECK(result.diagnostics.final_residual < 1e-9);
  // Deeper than the f = 2 bowl: rhs grows with the slope.
  CHECK(result.field.value(result.field.size() / 2) < 0.0);
}

TEST_CASE("continuation walks the rhs homotopy") {
  auto prob = unit_ball_21("2.5", "0", 9, BoundaryMode::Projection);
  auto result = etaq::continuation_solve(prob);
  CHECK(result.diagnostics.converged);
  CHECK(result.diagnostics.final_residual < 2.5e-10);
  REQUIRE(!result.diagnostics.history.empty());
  CHECK(result.diagnostics.history.front().homotopy_t <
        result.diagnostics.history.back().homotopy_t);
  CHECK(result.diagnostics.history.back().homotopy_t == doctest::Approx(1.0));

  // When the target already equals the mean-field start, every leg is exact.
  auto trivial = unit_ball_21("2", "(x1^2 + x2^2 + x3^2 - 1)/2", 9, BoundaryMode::Node);
  auto fixed = etaq::continuation_solve(trivial);
  CHECK(fixed.diagnostics.converged);
  CHECK(sup_error(fixed.field, [](const Eigen::VectorXd& x) {
          return (x.squaredNorm() - 1.0) / 2.0;
        }) < 1e-10);
}

TEST_CASE("iteration budget exhaustion reports nonconvergence") {
  // Nonlinear quotient: one Newton step cannot reach the tight tolerance.
  auto prob = unit_ball_21("2.5", "0", 9, BoundaryMode::Projection);
  etaq::SolveConfig cfg;
  cfg.max_iterations = 1;
  CHECK_THROWS_AS(etaq::newton_solve(prob, cfg), etaq::nonconvergence_error);
}

TEST_CASE("problem and domain dimensions must agree") {
  DirichletProblem prob{QuotientOp(3, 2, 1),
                        EtaParams(1.0, 1.0),
                        DomainSpec::box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1)),
                        pts(2, 5),
                        parse_expression("2"),
                        parse_expression("0"),
                        BoundaryMode::Node};
  GridField u(prob.domain, prob.npts);
  CHECK_THROWS_AS(etaq::residual(prob, u), etaq::input_error);
}

TEST_CASE("diagnostics export as CSV") {
  auto prob = unit_ball_21("2", "0", 9, BoundaryMode::Projection);
  auto result = etaq::newton_solve(prob);
  const std::string csv = etaq::diagnostics_to_csv(result.diagnostics);
  CHECK(csv.find("iteration,homotopy_t,residual_sup,step,cone_margin") !=
        std::string::npos);
  CHECK(csv.find("pogorelov") != std::string::npos);
}

TEST_SUITE_END();
