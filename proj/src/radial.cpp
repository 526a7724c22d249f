#include <etaq/radial.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <array>
#include <cmath>
#include <limits>
#include <set>

#include <etaq/errors.hpp>

namespace etaq {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Value at a (row, col) mesh slot with the poles folded in, so latitude
// stencils can reach across row 0 / row nlat+1 without special cases.
double ring_value(const RadialGraph& g, int row, int col) {
  if (row <= 0) return g.value(0);
  if (row >= g.nlat() + 1) return g.value(g.size() - 1);
  return g.value(g.node_id(row, col));
}

// First and second fundamental data of the radial graph at one node, in
// latitude-longitude coordinates (regular rows) or a pole-centered normal
// frame (poles, via Fourier modes of the adjacent ring).
struct LocalFrame {
  double r = 0.0;
  double phi = 0.0;
  double dphi = 0.0;
  double v = 0.0;
  double tau = 0.0;
  double big_phi = 0.0;
  Eigen::Vector2d dr = Eigen::Vector2d::Zero();
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d covhess = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
};

LocalFrame assemble_frame(const WarpModel& warp, double r, const Eigen::Vector2d& dr,
                          const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& covhess,
                          double grad_norm2) {
  if (!warp.contains(r))
    throw input_error("radial graph: r value leaves the warp interval");
  LocalFrame f;
  f.r = r;
  f.phi = warp.phi(r);
  f.dphi = warp.dphi(r);
  f.dr = dr;
  f.sigma = sigma;
  f.covhess = covhess;
  f.v = std::sqrt(f.phi * f.phi + grad_norm2);
  f.g = f.phi * f.phi * sigma + dr * dr.transpose();
  f.h = (-f.phi * covhess + 2.0 * f.dphi * dr * dr.transpose() +
         f.phi * f.phi * f.dphi * sigma) /
        f.v;
  f.tau = f.phi * f.phi / f.v;
  f.big_phi = warp.integral(r);
  return f;
}

LocalFrame pole_frame(const RadialGraph& graph, bool north) {
  const int nlon = graph.nlon();
  const int ring_row = north ? 1 : graph.nlat();
  const double rp = north ? graph.value(0) : graph.value(graph.size() - 1);
  const double a1 = graph.lat_spacing();

  // Fourier modes of the adjacent ring resolve the gradient and the normal-
  // coordinate Hessian at the pole: r = rp + a1(a cos + b sin)
  // + (a1^2/4)[(c+e) + (c-e) cos 2b + 2d sin 2b] + O(a1^3).
  double a0 = 0.0, a1c = 0.0, a1s = 0.0, a2c = 0.0, a2s = 0.0;
  for (int j = 0; j < nlon; ++j) {
    const double beta = 2.0 * kPi * j / nlon;
    const double rv = graph.value(graph.node_id(ring_row, j));
    a0 += rv;
    a1c += rv * std::cos(beta);
    a1s += rv * std::sin(beta);
    a2c += rv * std::cos(2.0 * beta);
    a2s += rv * std::sin(2.0 * beta);
  }
  a0 /= nlon;
  a1c *= 2.0 / nlon;
  a1s *= 2.0 / nlon;
  a2c *= 2.0 / nlon;
  a2s *= 2.0 / nlon;

  const double a = a1c / a1;
  const double b = a1s / a1;
  const double cpe = 4.0 * (a0 - rp) / (a1 * a1);
  const double cme = 4.0 * a2c / (a1 * a1);
  const double d = 2.0 * a2s / (a1 * a1);
  Eigen::Vector2d dr(a, b);
  Eigen::Matrix2d covhess;
  covhess << 0.5 * (cpe + cme), d, d, 0.5 * (cpe - cme);
  return assemble_frame(graph.warp(), rp, dr, Eigen::Matrix2d::Identity(), covhess,
                        dr.squaredNorm());
}

LocalFrame row_frame(const RadialGraph& graph, int row, int col) {
  const double da = graph.lat_spacing();
  const double db = graph.lon_spacing();
  const double alpha = row * da;
  const double sa = std::sin(alpha);
  const double ca = std::cos(alpha);

  const double rc = ring_value(graph, row, col);
  const double rn = ring_value(graph, row + 1, col);
  const double rs = ring_value(graph, row - 1, col);
  const double re = ring_value(graph, row, col + 1);
  const double rw = ring_value(graph, row, col - 1);
  const double r_a = (rn - rs) / (2.0 * da);
  const double r_b = (re - rw) / (2.0 * db);
  const double r_aa = (rn - 2.0 * rc + rs) / (da * da);
  const double r_bb = (re - 2.0 * rc + rw) / (db * db);
  const double r_ab = (ring_value(graph, row + 1, col + 1) - ring_value(graph, row + 1, col - 1) -
                       ring_value(graph, row - 1, col + 1) + ring_value(graph, row - 1, col - 1)) /
                      (4.0 * da * db);

  Eigen::Vector2d dr(r_a, r_b);
  Eigen::Matrix2d sigma;
  sigma << 1.0, 0.0, 0.0, sa * sa;
  // Covariant Hessian in the round metric: Gamma^b_ab = cot, Gamma^a_bb = -sin cos.
  Eigen::Matrix2d covhess;
  covhess(0, 0) = r_aa;
  covhess(0, 1) = covhess(1, 0) = r_ab - (ca / sa) * r_b;
  covhess(1, 1) = r_bb + sa * ca * r_a;
  const double grad_norm2 = r_a * r_a + r_b * r_b / (sa * sa);
  return assemble_frame(graph.warp(), rc, dr, sigma, covhess, grad_norm2);
}

LocalFrame node_frame(const RadialGraph& graph, std::int64_t node) {
  if (node == 0) return pole_frame(graph, true);
  if (node == graph.size() - 1) return pole_frame(graph, false);
  const int row = 1 + static_cast<int>((node - 1) / graph.nlon());
  const int col = static_cast<int>((node - 1) % graph.nlon());
  return row_frame(graph, row, col);
}

}  // namespace

RadialGraph::RadialGraph(WarpModel warp, int nlat, int nlon)
    : warp_(std::move(warp)), nlat_(nlat), nlon_(nlon) {
  if (nlat < 3)
    throw input_error("RadialGraph: need at least three latitude rows");
  if (nlon < 8)
    throw input_error("RadialGraph: need at least eight longitude samples");
  values_ = Eigen::VectorXd::Zero(size());
}

double RadialGraph::lat_spacing() const { return kPi / (nlat_ + 1); }

double RadialGraph::lon_spacing() const { return 2.0 * kPi / nlon_; }

std::int64_t RadialGraph::node_id(int row, int col) const {
  if (row <= 0) return 0;
  if (row >= nlat_ + 1) return size() - 1;
  const int wrapped = ((col % nlon_) + nlon_) % nlon_;
  return 1 + static_cast<std::int64_t>(row - 1) * nlon_ + wrapped;
}

double RadialGraph::lat(std::int64_t node) const {
  if (node == 0) return 0.0;
  if (node == size() - 1) return kPi;
  const int row = 1 + static_cast<int>((node - 1) / nlon_);
  return row * lat_spacing();
}

double RadialGraph::lon(std::int64_t node) const {
  if (is_pole(node)) return 0.0;
  const int col = static_cast<int>((node - 1) % nlon_);
  return col * lon_spacing();
}

void RadialGraph::fill(const std::function<double(double, double)>& fn) {
  for (std::int64_t node = 0; node < size(); ++node) values_(node) = fn(lat(node), lon(node));
}

SurfaceGeometry radial_geometry(const RadialGraph& graph) {
  const auto count = graph.size();
  SurfaceGeometry geom;
  geom.nodes.resize(static_cast<std::size_t>(count));
  geom.metric.reserve(static_cast<std::size_t>(count));
  geom.second_form.reserve(static_cast<std::size_t>(count));
  geom.kappa.resize(count, 2);
  geom.eta.resize(count, 2);
  geom.tau.resize(count);
  geom.phi_value.resize(count);
  geom.positions.resize(count, 3);
  geom.position_labels = {"lat", "lon", "r"};

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> eig;
  for (std::int64_t node = 0; node < count; ++node) {
    const LocalFrame f = node_frame(graph, node);
    geom.nodes[static_cast<std::size_t>(node)] = node;
    eig.compute(f.h, f.g, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (eig.info() != Eigen::Success)
      throw error("radial_geometry: curvature eigenproblem failed");
    const double k0 = eig.eigenvalues()(1);  // descending
    const double k1 = eig.eigenvalues()(0);
    geom.kappa(node, 0) = k0;
    geom.kappa(node, 1) = k1;
    geom.eta(node, 0) = k1;  // sum(kappa) - kappa_i in the same order
    geom.eta(node, 1) = k0;
    geom.tau(node) = f.tau;
    geom.phi_value(node) = f.big_phi;
    geom.positions(node, 0) = graph.lat(node);
    geom.positions(node, 1) = graph.lon(node);
    geom.positions(node, 2) = f.r;
    geom.metric.push_back(f.g);
    geom.second_form.push_back(f.h);
  }
  return geom;
}

SupportReport verify_support_identities(const RadialGraph& graph) {
  const int nlat = graph.nlat();
  const int nlon = graph.nlon();
  const double da = graph.lat_spacing();
  const double db = graph.lon_spacing();
  const bool closed_form = graph.warp().space_form().has_value();

  // Per-node fields over the regular rows; tensors in (lat, lon) components.
  const int rows = nlat + 2;
  Eigen::MatrixXd tau(rows, nlon), phi_field(rows, nlon), rfield(rows, nlon);
  std::array<Eigen::MatrixXd, 3> gf, hf;  // aa, ab, bb components
  for (auto& m : gf) m.resize(rows, nlon);
  for (auto& m : hf) m.resize(rows, nlon);
  std::vector<LocalFrame> frames(static_cast<std::size_t>(rows * nlon));
  for (int i = 1; i <= nlat; ++i)
    for (int j = 0; j < nlon; ++j) {
      const LocalFrame f = row_frame(graph, i, j);
      frames[static_cast<std::size_t>(i * nlon + j)] = f;
      tau(i, j) = f.tau;
      phi_field(i, j) = f.big_phi;
      rfield(i, j) = f.r;
      gf[0](i, j) = f.g(0, 0);
      gf[1](i, j) = f.g(0, 1);
      gf[2](i, j) = f.g(1, 1);
      hf[0](i, j) = f.h(0, 0);
      hf[1](i, j) = f.h(0, 1);
      hf[2](i, j) = f.h(1, 1);
    }

  const auto wrap = [nlon](int j) { return ((j % nlon) + nlon) % nlon; };
  // Coordinate partials of a stored field: [0] latitude, [1] longitude.
  const auto d1 = [&](const Eigen::MatrixXd& f, int i, int j, int axis) {
    if (axis == 0) return (f(i + 1, j) - f(i - 1, j)) / (2.0 * da);
    return (f(i, wrap(j + 1)) - f(i, wrap(j - 1))) / (2.0 * db);
  };
  const auto d2 = [&](const Eigen::MatrixXd& f, int i, int j, int a, int b) {
    if (a == b) {
      if (a == 0) return (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / (da * da);
      return (f(i, wrap(j + 1)) - 2.0 * f(i, j) + f(i, wrap(j - 1))) / (db * db);
    }
    return (f(i + 1, wrap(j + 1)) - f(i + 1, wrap(j - 1)) - f(i - 1, wrap(j + 1)) +
            f(i - 1, wrap(j - 1))) /
           (4.0 * da * db);
  };
  const auto tensor_entry = [](const std::array<Eigen::MatrixXd, 3>& f, int a, int b)
      -> const Eigen::MatrixXd& { return f[static_cast<std::size_t>(a + b)]; };

  SupportReport report;
  report.curvature_closed_form = closed_form;
  report.tau_hessian_sup = closed_form ? 0.0 : std::numeric_limits<double>::quiet_NaN();

  for (int i = 2; i <= nlat - 1; ++i) {
    const double alpha = i * da;
    if (alpha < kPi / 8.0 || alpha > 7.0 * kPi / 8.0) continue;
    for (int j = 0; j < nlon; ++j) {
      const LocalFrame& f = frames[static_cast<std::size_t>(i * nlon + j)];
      ++report.nodes_used;

      // Christoffel symbols of the induced metric from differenced components.
      const Eigen::Matrix2d ginv = f.g.inverse();
      double gamma[2][2][2];
      for (int k = 0; k < 2; ++k)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            double acc = 0.0;
            for (int l = 0; l < 2; ++l)
              acc += ginv(k, l) * (d1(tensor_entry(gf, b, l), i, j, a) +
                                   d1(tensor_entry(gf, a, l), i, j, b) -
                                   d1(tensor_entry(gf, a, b), i, j, l));
            gamma[k][a][b] = 0.5 * acc;
          }

      const Eigen::Vector2d dphi_fd(d1(phi_field, i, j, 0), d1(phi_field, i, j, 1));
      const Eigen::Vector2d dtau_fd(d1(tau, i, j, 0), d1(tau, i, j, 1));
      const Eigen::Vector2d dr_fd(d1(rfield, i, j, 0), d1(rfield, i, j, 1));

      // Identity 1: grad Phi = phi * grad r.
      for (int a = 0; a < 2; ++a)
        report.phi_gradient_sup =
            std::max(report.phi_gradient_sup, std::abs(dphi_fd(a) - f.phi * dr_fd(a)));

      // Identity 2: grad tau = h g^{-1} grad Phi.
      const Eigen::Vector2d tau_rhs = f.h * ginv * dphi_fd;
      for (int a = 0; a < 2; ++a)
        report.tau_gradient_sup =
            std::max(report.tau_gradient_sup, std::abs(dtau_fd(a) - tau_rhs(a)));

      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          // Covariant Hessians of the scalars Phi and tau.
          const double phi_hess =
              d2(phi_field, i, j, a, b) - gamma[0][a][b] * dphi_fd(0) - gamma[1][a][b] * dphi_fd(1);
          const double phi_rhs = f.dphi * f.g(a, b) - f.tau * f.h(a, b);
          report.phi_hessian_sup = std::max(report.phi_hessian_sup, std::abs(phi_hess - phi_rhs));

          if (!closed_form) continue;
          // nabla_k h_ab from differenced components, then the tau Hessian
          // identity; the ambient curvature term vanishes for space forms.
          const double tau_hess =
              d2(tau, i, j, a, b) - gamma[0][a][b] * dtau_fd(0) - gamma[1][a][b] * dtau_fd(1);
          double transport = 0.0;
          for (int k = 0; k < 2; ++k) {
            double nabla_h = d1(tensor_entry(hf, a, b), i, j, k);
            for (int d = 0; d < 2; ++d)
              nabla_h -= gamma[d][k][a] * f.h(d, b) + gamma[d][k][b] * f.h(a, d);
            for (int l = 0; l < 2; ++l) transport += ginv(k, l) * nabla_h * dphi_fd(l);
          }
          const Eigen::Matrix2d hh = f.h * ginv * f.h;
          const double tau_rhs2 = transport + f.dphi * f.h(a, b) - f.tau * hh(a, b);
          report.tau_hessian_sup =
              std::max(report.tau_hessian_sup, std::abs(tau_hess - tau_rhs2));
        }
    }
  }

  if (report.nodes_used == 0)
    throw stencil_error("verify_support_identities: no rows inside the polar collar");
  return report;
}

namespace {

double node_residual(const RadialGraph& graph, std::int64_t node, const expr::Expression& psi) {
  const LocalFrame f = node_frame(graph, node);
  expr::EvalContext ctx;
  ctx.bind_r(f.r);
  const double mean_curv = (f.g.inverse() * f.h).trace();  // sigma_1(eta) for n = 2
  return mean_curv - psi.eval(ctx);
}

Eigen::VectorXd full_residual(const RadialGraph& graph, const expr::Expression& psi) {
  Eigen::VectorXd res(graph.size());
  for (std::int64_t node = 0; node < graph.size(); ++node)
    res(node) = node_residual(graph, node, psi);
  return res;
}

// Rows whose residual stencil reads the given node's value: the node itself,
// its mesh neighbors (poles folded onto rows 0 and nlat+1), and, for ring
// rows next to a pole, the pole itself, whose Fourier extraction reads the ring.
std::set<std::int64_t> dependent_rows(const RadialGraph& graph, std::int64_t node) {
  std::set<std::int64_t> rows;
  if (graph.is_pole(node)) {
    rows.insert(node);
    const int ring = node == 0 ? 1 : graph.nlat();
    for (int j = 0; j < graph.nlon(); ++j) rows.insert(graph.node_id(ring, j));
    return rows;
  }
  const int row = 1 + static_cast<int>((node - 1) / graph.nlon());
  const int col = static_cast<int>((node - 1) % graph.nlon());
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj) rows.insert(graph.node_id(row + di, col + dj));
  return rows;
}

}  // namespace

RadialSolveResult radial_solve(const WarpModel& warp, const expr::Expression& psi,
                               const RadialSolveConfig& config) {
  if (!(config.r1 > 0.0) || !(config.r2 > config.r1))
    throw input_error("radial_solve: need 0 < r1 < r2");
  if (!warp.contains(config.r1) || !warp.contains(config.r2))
    throw input_error("radial_solve: confinement window leaves the warp interval");
  const double start =
      config.start_value > 0.0 ? config.start_value : std::sqrt(config.r1 * config.r2);
  if (!warp.contains(start))
    throw input_error("radial_solve: starting radius leaves the warp interval");

  RadialSolveResult result{RadialGraph(warp, config.nlat, config.nlon), false, 0, 0.0, true, {}};
  RadialGraph& graph = result.graph;
  graph.values().setConstant(start);

  const auto n = graph.size();
  Eigen::VectorXd res = full_residual(graph, psi);
  double sup = res.lpNorm<Eigen::Infinity>();
  result.history.push_back({0, sup, 0.0});

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;

  const auto confined = [&](const Eigen::VectorXd& r) {
    return r.minCoeff() >= config.r1 - 1e-12 && r.maxCoeff() <= config.r2 + 1e-12;
  };
  if (!confined(graph.values())) result.stayed_confined = false;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    if (sup < config.tolerance) break;

    // Finite-difference Jacobian, sparse by stencil locality.
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::int64_t bcol = 0; bcol < n; ++bcol) {
      const double saved = graph.value(bcol);
      double delta = 1e-6 * std::max(1.0, std::abs(saved));
      // One-sided toward the interior when the iterate hugs the interval end.
      if (saved + delta > warp.hi()) delta = -delta;
      graph.set_value(bcol, saved + delta);
      for (const auto row : dependent_rows(graph, bcol)) {
        const double bumped = node_residual(graph, row, psi);
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(bcol),
                              (bumped - res(row)) / delta);
      }
      graph.set_value(bcol, saved);
    }
    Eigen::SparseMatrix<double> jac(n, n);
    jac.setFromTriplets(triplets.begin(), triplets.end());
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success)
      throw nonconvergence_error("radial_solve: Jacobian factorization failed");
    const Eigen::VectorXd step = lu.solve(-res);

    // Damped update: stay finite, positive, inside the warp interval, and
    // strictly decrease the sup residual.
    const Eigen::VectorXd base = graph.values();
    double s = 1.0;
    bool accepted = false;
    while (s >= config.min_step) {
      const Eigen::VectorXd candidate = base + s * step;
      if (candidate.allFinite() && candidate.minCoeff() > 0.0 &&
          warp.contains(candidate.minCoeff()) && warp.contains(candidate.maxCoeff())) {
        graph.values() = candidate;
        const Eigen::VectorXd trial = full_residual(graph, psi);
        const double trial_sup = trial.lpNorm<Eigen::Infinity>();
        if (trial_sup < sup) {
          res = trial;
          sup = trial_sup;
          accepted = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted) {
      graph.values() = base;
      throw nonconvergence_error("radial_solve: line search stalled at residual " +
                                 std::to_string(sup));
    }
    if (!confined(graph.values())) result.stayed_confined = false;
    result.iterations = iter;
    result.history.push_back({iter, sup, s});
  }

  result.final_residual = sup;
  result.converged = sup < config.tolerance;
  if (!result.converged)
    throw nonconvergence_error("radial_solve: residual " + std::to_string(sup) + " after " +
                               std::to_string(result.iterations) + " iterations");
  return result;
}

}  // namespace etaq
