#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <etaq/errors.hpp>
#include <etaq/expression.hpp>
#include <etaq/radial.hpp>
#include <etaq/spectrum.hpp>
#include <etaq/surface.hpp>
#include <etaq/symfunc.hpp>
#include <etaq/warp.hpp>

using etaq::QuotientOp;
using etaq::RadialGraph;
using etaq::RadialSolveConfig;
using etaq::WarpModel;
using etaq::expr::parse_expression;

namespace {

/// Sup over all nodes of |r - target|.
double radius_deviation(const RadialGraph& graph, double target) {
  double dev = 0.0;
  for (std::int64_t node = 0; node < graph.size(); ++node)
    dev = std::max(dev, std::abs(graph.value(node) - target));
  return dev;
}

}  // namespace

TEST_SUITE_BEGIN("radial");

TEST_CASE("mesh layout folds poles and wraps longitude") {
  const WarpModel warp = WarpModel::linear(0.5, 3.5);
  RadialGraph graph(warp, 4, 8);

  CHECK(graph.size() == 4 * 8 + 2);
  CHECK(graph.nlat() == 4);
  CHECK(graph.nlon() == 8);
  CHECK(graph.lat_spacing() == doctest::Approx(M_PI / 5));
  CHECK(graph.lon_spacing() == doctest::Approx(M_PI / 4));

  // Row indices clamp to the poles; columns wrap.
  CHECK(graph.node_id(0, 3) == 0);
  CHECK(graph.node_id(-2, 0) == 0);
  CHECK(graph.node_id(5, 6) == graph.size() - 1);
  CHECK(graph.node_id(9, 1) == graph.size() - 1);
  CHECK(graph.node_id(1, 0) == 1);
  CHECK(graph.node_id(2, 3) == 1 + 8 + 3);
  CHECK(graph.node_id(1, 8) == graph.node_id(1, 0));
  CHECK(graph.node_id(1, -1) == graph.node_id(1, 7));

  CHECK(graph.is_pole(0));
  CHECK(graph.is_pole(graph.size() - 1));
  CHECK(!graph.is_pole(1));

  CHECK(graph.lat(0) == doctest::Approx(0.0));
  CHECK(graph.lat(graph.size() - 1) == doctest::Approx(M_PI));
  CHECK(graph.lat(graph.node_id(2, 0)) == doctest::Approx(2 * M_PI / 5));
  CHECK(graph.lon(graph.node_id(1, 3)) == doctest::Approx(3 * M_PI / 4));

  CHECK_THROWS_AS(RadialGraph(warp, 2, 8), etaq::input_error);
  CHECK_THROWS_AS(RadialGraph(warp, 4, 7), etaq::input_error);
}

TEST_CASE("geometry rejects radii outside the warp interval") {
  RadialGraph graph(WarpModel::linear(0.5, 3.5), 4, 8);
  graph.values().setConstant(4.0);
  CHECK_THROWS_AS(etaq::radial_geometry(graph), etaq::input_error);
}

TEST_CASE("constant graphs reproduce geodesic sphere curvatures") {
  struct Case {
    WarpModel warp;
    double r0;
  };
  const std::vector<Case> cases = {{WarpModel::linear(0.5, 3.5), 2.0},
                                   {WarpModel::sine(0.1, 1.5), M_PI / 4},
                                   {WarpModel::hyperbolic(0.25, 2.0), 1.0}};
  const QuotientOp op(2, 1, 0);

  for (const auto& [warp, r0] : cases) {
    CAPTURE(r0);
    RadialGraph graph(warp, 8, 16);
    graph.values().setConstant(r0);
    const auto geom = etaq::radial_geometry(graph);
    const double kappa_exact = warp.ratio(r0);

    for (std::int64_t node = 0; node < graph.size(); ++node) {
      CAPTURE(node);
      // Both principal curvatures equal phi'/phi on a geodesic sphere,
      // poles included (their values come from the ring Fourier fit).
      CHECK(geom.kappa(node, 0) == doctest::Approx(kappa_exact).epsilon(1e-12));
      CHECK(geom.kappa(node, 1) == doctest::Approx(kappa_exact).epsilon(1e-12));

      // eta_i = sum(kappa) - kappa_i, stored in kappa's column order.
      const double ksum = geom.kappa(node, 0) + geom.kappa(node, 1);
      CHECK(geom.eta(node, 0) == doctest::Approx(ksum - geom.kappa(node, 0)));
      CHECK(geom.eta(node, 1) == doctest::Approx(ksum - geom.kappa(node, 1)));
      CHECK(geom.eta(node, 0) + geom.eta(node, 1) == doctest::Approx(ksum));  // (n-1)*sum

      CHECK(geom.tau(node) == doctest::Approx(warp.phi(r0)).epsilon(1e-12));
      CHECK(geom.tau(node) > 0.0);
      CHECK(geom.phi_value(node) == doctest::Approx(warp.integral(r0)).epsilon(1e-12));

      const Eigen::VectorXd eta = geom.eta.row(node).transpose();
      CHECK(etaq::quotient(op, eta) ==
            doctest::Approx(etaq::sphere_oracle(warp, r0, op)).epsilon(1e-10));
    }
    CHECK(geom.normal_height.size() == 0);
    CHECK(geom.position_labels == std::vector<std::string>{"lat", "lon", "r"});
  }
}

TEST_CASE("support identities vanish on constant graphs") {
  RadialGraph graph(WarpModel::linear(0.5, 3.5), 16, 32);
  graph.values().setConstant(2.0);
  const auto rep = etaq::verify_support_identities(graph);
  CHECK(rep.curvature_closed_form);
  CHECK(rep.nodes_used > 0);
  CHECK(rep.phi_gradient_sup <= 1e-12);
  CHECK(rep.tau_gradient_sup <= 1e-12);
  CHECK(rep.tau_hessian_sup <= 1e-12);
  CHECK(rep.phi_hessian_sup <= 1e-12);
}

TEST_CASE("support identity residuals converge at second order") {
  const WarpModel warp = WarpModel::linear(0.5, 3.5);
  std::vector<etaq::SupportReport> reports;
  for (const int m : {16, 32, 64}) {
    RadialGraph graph(warp, m, 2 * m);
    graph.fill([](double lat, double lon) {
      return 2.0 + 0.1 * (std::cos(lat) + 0.5 * std::sin(lat) * std::cos(lon));
    });
    reports.push_back(etaq::verify_support_identities(graph));
  }

  CHECK(reports[0].nodes_used == 384);
  CHECK(reports[1].nodes_used == 1536);
  CHECK(reports[2].nodes_used == 6144);

  for (std::size_t level = 1; level < reports.size(); ++level) {
    CHECK(reports[level].phi_gradient_sup * 3.0 < reports[level - 1].phi_gradient_sup);
    CHECK(reports[level].tau_gradient_sup * 3.0 < reports[level - 1].tau_gradient_sup);
    CHECK(reports[level].tau_hessian_sup * 3.0 < reports[level - 1].tau_hessian_sup);
    CHECK(reports[level].phi_hessian_sup * 3.0 < reports[level - 1].phi_hessian_sup);
  }
  CHECK(reports[2].phi_gradient_sup < 1.1e-5);
  CHECK(reports[2].tau_gradient_sup < 3.5e-6);
  CHECK(reports[2].tau_hessian_sup < 1.4e-4);
  CHECK(reports[2].phi_hessian_sup < 2.7e-4);
}

TEST_CASE("custom warps skip the curvature-dependent identity") {
  const WarpModel warp = WarpModel::custom(parse_expression("r + 0.05*r^2"), 0.5, 3.0);
  RadialGraph graph(warp, 12, 24);
  graph.values().setConstant(1.5);
  const auto rep = etaq::verify_support_identities(graph);
  CHECK(!rep.curvature_closed_form);
  CHECK(std::isnan(rep.tau_hessian_sup));
  CHECK(rep.phi_gradient_sup <= 1e-12);
  CHECK(rep.tau_gradient_sup <= 1e-12);
  CHECK(rep.phi_hessian_sup <= 1e-12);
}

TEST_CASE("mean curvature solve lands on the prescribed sphere") {
  RadialSolveConfig config;
  config.r1 = 1.0;
  config.r2 = 3.0;
  const auto psi = parse_expression("(2 + 0.1*(2 - r))/r");  // root at r = 2
  const auto result = etaq::radial_solve(WarpModel::linear(0.5, 3.5), psi, config);

  CHECK(result.converged);
  CHECK(result.stayed_confined);
  CHECK(result.iterations <= 8);
  CHECK(result.final_residual < 1e-8);
  CHECK(radius_deviation(result.graph, 2.0) < 1e-8);

  REQUIRE(result.history.size() == static_cast<std::size_t>(result.iterations) + 1);
  CHECK(result.history.front().iteration == 0);
  CHECK(result.history.front().step == 0.0);
  CHECK(result.history.back().residual_sup < result.history.front().residual_sup);
}

TEST_CASE("a stationary start converges without iterating") {
  RadialSolveConfig config;
  config.nlat = 8;
  config.nlon = 16;
  config.r1 = 1.0;
  config.r2 = 3.0;
  config.start_value = 2.0;  // sigma_1(eta) = 2/r = 1 already holds
  const auto result = etaq::radial_solve(WarpModel::linear(0.5, 3.5), parse_expression("1"), config);
  CHECK(result.converged);
  CHECK(result.iterations == 0);
  CHECK(result.history.size() == 1);
  CHECK(radius_deviation(result.graph, 2.0) <= 1e-14);
}

TEST_CASE("sine warp solve finds the quarter-pi sphere") {
  RadialSolveConfig config;
  config.r1 = M_PI / 8;
  config.r2 = 3 * M_PI / 8;
  // 2*cot(r) perturbed to pin the root at pi/4 exactly.
  const auto psi =
      parse_expression("(2*cos(r)/sin(r))*(1 + 0.05*(0.7853981633974483 - r))");
  const auto result = etaq::radial_solve(WarpModel::sine(0.1, 1.5), psi, config);
  CHECK(result.converged);
  CHECK(result.stayed_confined);
  CHECK(radius_deviation(result.graph, M_PI / 4) < 1e-8);
}

TEST_CASE("a root outside the window trips the confinement flag") {
  RadialSolveConfig config;
  config.r1 = 2.5;
  config.r2 = 3.2;
  const auto psi = parse_expression("(2 + 0.1*(2 - r))/r");
  const auto result = etaq::radial_solve(WarpModel::linear(0.5, 3.5), psi, config);
  CHECK(result.converged);
  CHECK(!result.stayed_confined);
  CHECK(radius_deviation(result.graph, 2.0) < 1e-8);
}

TEST_CASE("a rootless prescription raises nonconvergence") {
  RadialSolveConfig config;
  config.nlat = 8;
  config.nlon = 16;
  config.r1 = 1.0;
  config.r2 = 3.0;
  config.max_iterations = 25;
  // sigma_1(eta) = 2/r never reaches 0.1 inside (0.5, 3.5).
  CHECK_THROWS_AS(etaq::radial_solve(WarpModel::linear(0.5, 3.5), parse_expression("0.1"), config),
                  etaq::nonconvergence_error);
}

TEST_CASE("solver validates its configuration") {
  const WarpModel warp = WarpModel::linear(0.5, 3.5);
  const auto psi = parse_expression("1");
  RadialSolveConfig config;

  config.r1 = 0.0;
  config.r2 = 3.0;
  CHECK_THROWS_AS(etaq::radial_solve(warp, psi, config), etaq::input_error);

  config.r1 = 3.0;
  config.r2 = 1.0;
  CHECK_THROWS_AS(etaq::radial_solve(warp, psi, config), etaq::input_error);

  config.r1 = 1.0;
  config.r2 = 4.0;  // leaves the warp interval
  CHECK_THROWS_AS(etaq::radial_solve(warp, psi, config), etaq::input_error);

  config.r2 = 3.0;
  config.start_value = 0.4;  // below the warp interval
  CHECK_THROWS_AS(etaq::radial_solve(warp, psi, config), etaq::input_error);
}

TEST_CASE("radial geometry serializes with spherical coordinates") {
  RadialGraph graph(WarpModel::linear(0.5, 3.5), 4, 8);
  graph.values().setConstant(2.0);
  const std::string csv = etaq::surface_to_csv(etaq::radial_geometry(graph));

  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header == "node,lat,lon,r,kappa1,kappa2,eta1,eta2,tau,phi");

  std::int64_t lines = 0;
  for (const char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == graph.size() + 1);

  const std::string again = etaq::surface_to_csv(etaq::radial_geometry(graph));
  CHECK(csv == again);
}

TEST_SUITE_END();
