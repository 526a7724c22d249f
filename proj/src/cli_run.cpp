#include <etaq/cli_run.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <etaq/csv.hpp>
#include <etaq/dirichlet.hpp>
#include <etaq/errors.hpp>
#include <etaq/expression.hpp>
#include <etaq/identities.hpp>
#include <etaq/radial.hpp>
#include <etaq/surface.hpp>
#include <etaq/sweep_run.hpp>
#include <etaq/warp.hpp>

namespace etaq::cli {

namespace {

using nlohmann::json;

bool g_verbose = false;

void note(const std::string& message) {
  if (g_verbose) std::cerr << "note: " << message << "\n";
}

json load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open spec file: " + path);
  note("reading spec " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw input_error("spec file " + path + ": " + e.what());
  }
}

/// Missing-key diagnostics that name the offending field.
const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw input_error(std::string("spec is missing \"") + key + "\"");
  return *it;
}

double num_or(const json& j, const char* key, double fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->get<double>();
}

std::int64_t int_or(const json& j, const char* key, std::int64_t fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->get<std::int64_t>();
}

QuotientOp parse_op(const json& j) {
  const auto arr = j.get<std::vector<int>>();
  if (arr.size() != 3) throw input_error("\"op\" must be [n, k, l]");
  return QuotientOp(arr[0], arr[1], arr[2]);
}

expr::Expression parse_expr_field(const json& j, const char* key) {
  return expr::parse_expression(field(j, key).get<std::string>());
}

WarpModel parse_warp(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  const double lo = field(j, "lo").get<double>();
  const double hi = field(j, "hi").get<double>();
  if (kind == "linear") return WarpModel::linear(lo, hi);
  if (kind == "sine") return WarpModel::sine(lo, hi);
  if (kind == "hyperbolic") return WarpModel::hyperbolic(lo, hi);
  if (kind == "custom") return WarpModel::custom(parse_expr_field(j, "phi"), lo, hi);
  throw input_error("warp kind must be linear, sine, hyperbolic, or custom");
}

Eigen::VectorXd parse_vector(const json& j) {
  const auto arr = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(arr.data(), static_cast<Eigen::Index>(arr.size()));
}

DomainSpec parse_domain(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "box") return DomainSpec::box(parse_vector(field(j, "lo")), parse_vector(field(j, "hi")));
  if (kind == "ball")
    return DomainSpec::ball(parse_vector(field(j, "center")), field(j, "radius").get<double>());
  throw input_error("domain kind must be box or ball");
}

void write_artifact(const std::filesystem::path& dir, const std::string& name,
                    const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write " + path.string());
  out << content;
  note("wrote " + path.string() + " (" + std::to_string(content.size()) + " bytes)");
}

// ---- verify: inequality sweep over cone samples ----

int run_verify(const std::string& spec_path, const std::string& out_dir,
               std::uint64_t seed, bool seed_given, double tol, bool tol_given) {
  const json j = load_spec(spec_path);
  SweepSpec spec;
  for (const auto& row : field(j, "nkl")) {
    const auto arr = row.get<std::vector<int>>();
    if (arr.size() != 3) throw input_error("\"nkl\" rows must be [n, k, l]");
    spec.nkl.push_back({arr[0], arr[1], arr[2]});
  }
  for (const auto& row : field(j, "theta_mu")) {
    const auto arr = row.get<std::vector<double>>();
    if (arr.size() != 2) throw input_error("\"theta_mu\" rows must be [theta, mu]");
    spec.theta_mu.push_back({arr[0], arr[1]});
  }
  spec.count = static_cast<int>(int_or(j, "count", 1000));
  spec.seed = static_cast<std::uint64_t>(int_or(j, "seed", 0));
  spec.tolerance = num_or(j, "tolerance", spec.tolerance);
  spec.concavity_directions =
      static_cast<int>(int_or(j, "concavity_directions", spec.concavity_directions));
  if (seed_given) spec.seed = seed;
  if (tol_given) spec.tolerance = tol;

  const SweepReport report = sweep(spec);
  write_artifact(out_dir, "sweep.csv", to_csv(report));
  std::cout << "verify: rows=" << report.rows.size() << " failures=" << report.total_failures()
            << "\n";
  return report.total_failures() == 0 ? 0 : 2;
}

// ---- solve: Dirichlet problem on a grid ----

int run_solve(const std::string& spec_path, const std::string& out_dir,
              const std::vector<int>& grid, double tol, bool tol_given, double beta,
              bool beta_given) {
  const json j = load_spec(spec_path);
  const QuotientOp op = parse_op(field(j, "op"));
  DirichletProblem prob{op,
                        EtaParams(num_or(j, "theta", 1.0), num_or(j, "mu", 1.0)),
                        parse_domain(field(j, "domain")),
                        Eigen::VectorXi(),
                        parse_expr_field(j, "rhs"),
                        parse_expr_field(j, "boundary")};
  std::vector<int> npts = grid;
  if (npts.empty()) npts = field(j, "npts").get<std::vector<int>>();
  if (npts.size() == 1) npts.assign(static_cast<std::size_t>(op.n), npts[0]);
  prob.npts = Eigen::Map<const Eigen::VectorXi>(npts.data(), static_cast<Eigen::Index>(npts.size()));
  if (j.value("boundary_mode", std::string("projection")) == "node")
    prob.boundary_mode = BoundaryMode::Node;

  SolveConfig config;
  config.max_iterations = static_cast<int>(int_or(j, "max_iterations", config.max_iterations));
  config.tolerance_factor = num_or(j, "tolerance_factor", config.tolerance_factor);
  config.monitor_beta = num_or(j, "monitor_beta", config.monitor_beta);
  if (tol_given) config.tolerance_factor = tol;
  if (beta_given) config.monitor_beta = beta;

  const SolveResult result = [&] {
    if (j.value("continuation", false)) {
      ContinuationConfig cont;
      cont.steps = static_cast<int>(int_or(j, "continuation_steps", cont.steps));
      cont.solve = config;
      return continuation_solve(prob, cont);
    }
    return newton_solve(prob, config);
  }();

  write_artifact(out_dir, "solution.csv", field_to_csv(result.field));
  write_artifact(out_dir, "iterations.csv", diagnostics_to_csv(result.diagnostics));
  std::cout << "solve: converged=" << (result.diagnostics.converged ? 1 : 0)
            << " iterations=" << result.diagnostics.iterations
            << " residual=" << csv::format(result.diagnostics.final_residual) << "\n";
  return 0;
}

// ---- geometry: graph or radial hypersurface analysis ----

std::string report_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
  csv::Writer w;
  w.line("check,value");
  for (const auto& [name, value] : rows) w.cell(name).cell(value).endrow();
  return w.str();
}

int run_geometry(const std::string& spec_path, const std::string& out_dir) {
  const json j = load_spec(spec_path);
  const std::string kind = field(j, "kind").get<std::string>();

  if (kind == "graph") {
    const auto npts = field(j, "npts").get<std::vector<int>>();
    GridField u(parse_domain(field(j, "domain")),
                Eigen::Map<const Eigen::VectorXi>(npts.data(),
                                                  static_cast<Eigen::Index>(npts.size())));
    const expr::Expression height = parse_expr_field(j, "height");
    u.fill([&height](const Eigen::VectorXd& x) {
      expr::EvalContext ctx;
      ctx.bind_x(x);
      ctx.bind_r(x.norm());
      return height.eval(ctx);
    });
    write_artifact(out_dir, "surface.csv", surface_to_csv(graph_geometry(u)));

    std::vector<std::pair<std::string, std::string>> rows;
    const CommutatorReport comm = verify_commutator(u);
    rows.emplace_back("codazzi_sup", csv::format(comm.codazzi_sup));
    rows.emplace_back("interchange_sup", csv::format(comm.interchange_sup));
    rows.emplace_back("commutator_nodes", csv::format(comm.nodes_used));
    if (j.contains("op")) {
      const SuwReport suw =
          verify_suw_identity(u, parse_op(j["op"]), num_or(j, "kappa_shift", 0.0));
      rows.emplace_back("suw_residual_sup", csv::format(suw.residual_sup));
      rows.emplace_back("suw_nodes", csv::format(suw.nodes_used));
      rows.emplace_back("suw_regularized", std::string(suw.regularized ? "1" : "0"));
    }
    write_artifact(out_dir, "identities.csv", report_csv(rows));
    std::cout << "geometry: kind=graph codazzi=" << csv::format(comm.codazzi_sup)
              << " interchange=" << csv::format(comm.interchange_sup) << "\n";
    return 0;
  }

  if (kind == "radial") {
    RadialGraph graph(parse_warp(field(j, "warp")), static_cast<int>(int_or(j, "nlat", 16)),
                      static_cast<int>(int_or(j, "nlon", 32)));
    // Radius expression over spherical coordinates: x1 = latitude,
    // x2 = longitude.
    const expr::Expression radius = parse_expr_field(j, "radius");
    graph.fill([&radius](double lat, double lon) {
      expr::EvalContext ctx;
      Eigen::Vector2d x(lat, lon);
      ctx.bind_x(x);
      return radius.eval(ctx);
    });
    write_artifact(out_dir, "surface.csv", surface_to_csv(radial_geometry(graph)));

    const SupportReport rep = verify_support_identities(graph);
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("phi_gradient_sup", csv::format(rep.phi_gradient_sup));
    rows.emplace_back("tau_gradient_sup", csv::format(rep.tau_gradient_sup));
    rows.emplace_back("tau_hessian_sup", csv::format(rep.tau_hessian_sup));
    rows.emplace_back("phi_hessian_sup", csv::format(rep.phi_hessian_sup));
    rows.emplace_back("curvature_closed_form", std::string(rep.curvature_closed_form ? "1" : "0"));
    rows.emplace_back("support_nodes", csv::format(rep.nodes_used));
    write_artifact(out_dir, "support.csv", report_csv(rows));
    std::cout << "geometry: kind=radial phi_hessian=" << csv::format(rep.phi_hessian_sup) << "\n";
    return 0;
  }

  throw input_error("geometry kind must be graph or radial");
}

// ---- barrier: three-condition existence check ----

int run_barrier(const std::string& spec_path, const std::string& out_dir) {
  const json j = load_spec(spec_path);
  const BarrierReport rep =
      barrier_check(parse_warp(field(j, "warp")), parse_expr_field(j, "psi"),
                    field(j, "r1").get<double>(), field(j, "r2").get<double>(),
                    parse_op(field(j, "op")), static_cast<int>(int_or(j, "samples", 512)));
  write_artifact(out_dir, "barrier.csv", barrier_to_csv(rep));
  const bool ok = rep.inner_ok && rep.outer_ok && rep.monotone_ok;
  std::cout << "barrier: inner=" << csv::format(rep.inner_margin)
            << " outer=" << csv::format(rep.outer_margin)
            << " monotone=" << csv::format(rep.monotone_margin) << " ok=" << (ok ? 1 : 0) << "\n";
  return ok ? 0 : 2;
}

// ---- radial-solve: prescribed mean curvature sphere solve ----

int run_radial_solve(const std::string& spec_path, const std::string& out_dir,
                     const std::vector<int>& grid, double tol, bool tol_given) {
  const json j = load_spec(spec_path);
  RadialSolveConfig config;
  config.nlat = static_cast<int>(int_or(j, "nlat", config.nlat));
  config.nlon = static_cast<int>(int_or(j, "nlon", config.nlon));
  if (!grid.empty()) {
    if (grid.size() != 2) throw input_error("--grid for radial-solve takes nlat nlon");
    config.nlat = grid[0];
    config.nlon = grid[1];
  }
  config.r1 = field(j, "r1").get<double>();
  config.r2 = field(j, "r2").get<double>();
  config.max_iterations = static_cast<int>(int_or(j, "max_iterations", config.max_iterations));
  config.tolerance = num_or(j, "tolerance", config.tolerance);
  config.start_value = num_or(j, "start_value", config.start_value);
  if (tol_given) config.tolerance = tol;

  const RadialSolveResult result =
      radial_solve(parse_warp(field(j, "warp")), parse_expr_field(j, "psi"), config);

  write_artifact(out_dir, "surface.csv", surface_to_csv(radial_geometry(result.graph)));
  csv::Writer hist;
  hist.line("iteration,residual_sup,step");
  for (const auto& row : result.history)
    hist.cell(row.iteration).cell(row.residual_sup).cell(row.step).endrow();
  write_artifact(out_dir, "iterations.csv", hist.str());

  if (!result.stayed_confined)
    std::cerr << "warning: iterates left the confinement window [r1, r2]\n";
  std::cout << "radial-solve: converged=" << (result.converged ? 1 : 0)
            << " iterations=" << result.iterations
            << " residual=" << csv::format(result.final_residual)
            << " confined=" << (result.stayed_confined ? 1 : 0) << "\n";
  return 0;
}

// ---- probe-kn: top-order degeneration ladder ----

int run_probe_kn(const std::string& spec_path, const std::string& out_dir) {
  const json j = load_spec(spec_path);
  const QuotientOp op = parse_op(field(j, "op"));
  const EtaParams params(num_or(j, "theta", 1.0), num_or(j, "mu", 1.0));
  std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  if (j.contains("eps")) eps = j["eps"].get<std::vector<double>>();

  const auto rows = degeneration_probe(op, params, eps);
  csv::Writer w;
  w.line("epsilon,min_ratio,second_min_ratio");
  for (const auto& row : rows)
    w.cell(row.epsilon).cell(row.min_ratio).cell(row.second_min_ratio).endrow();
  write_artifact(out_dir, "probe.csv", w.str());
  std::cout << "probe-kn: rows=" << rows.size() << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"sigma_k quotient toolkit: cone sweeps, Dirichlet solves, hypersurface geometry"};
  app.require_subcommand(1);
  g_verbose = false;
  app.add_flag("-v,--verbose", g_verbose, "diagnostic notes on standard error");

  std::string spec_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  double tol = 0.0;
  double beta = 0.0;
  std::vector<int> grid;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec,-s", spec_path, "JSON config path")->required();
    sub->add_option("--out,-o", out_dir, "output directory for CSV artifacts");
  };

  CLI::App* verify = app.add_subcommand("verify", "inequality sweep over cone samples");
  add_common(verify);
  CLI::Option* seed_opt = verify->add_option("--seed", seed, "sampling seed override");
  CLI::Option* verify_tol = verify->add_option("--tol", tol, "margin tolerance override");

  CLI::App* solve = app.add_subcommand("solve", "Dirichlet problem on a grid");
  add_common(solve);
  CLI::Option* grid_opt = solve->add_option("--grid", grid, "points per axis override");
  CLI::Option* solve_tol = solve->add_option("--tol", tol, "residual tolerance factor override");
  CLI::Option* beta_opt = solve->add_option("--beta", beta, "depth-weight exponent override");

  CLI::App* geometry = app.add_subcommand("geometry", "graph or radial hypersurface analysis");
  add_common(geometry);

  CLI::App* barrier = app.add_subcommand("barrier", "sphere barrier existence check");
  add_common(barrier);

  CLI::App* radial = app.add_subcommand("radial-solve", "prescribed curvature sphere solve");
  add_common(radial);
  CLI::Option* radial_grid = radial->add_option("--grid", grid, "nlat nlon override");
  CLI::Option* radial_tol = radial->add_option("--tol", tol, "residual tolerance override");

  CLI::App* probe = app.add_subcommand("probe-kn", "top-order degeneration ladder");
  add_common(probe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (verify->parsed())
      return run_verify(spec_path, out_dir, seed, !seed_opt->empty(), tol, !verify_tol->empty());
    if (solve->parsed())
      return run_solve(spec_path, out_dir, grid, tol, !solve_tol->empty(), beta,
                       !beta_opt->empty());
    if (geometry->parsed()) return run_geometry(spec_path, out_dir);
    if (barrier->parsed()) return run_barrier(spec_path, out_dir);
    if (radial->parsed())
      return run_radial_solve(spec_path, out_dir,
                              radial_grid->empty() ? std::vector<int>() : grid, tol,
                              !radial_tol->empty());
    if (probe->parsed()) return run_probe_kn(spec_path, out_dir);
    return 3;
  } catch (const nonconvergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const admissibility_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const positivity_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("etaq");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace etaq::cli
