#include <etaq/surface.hpp>

#include <Eigen/Eigenvalues>

#include <charconv>
#include <cstdio>

#include <etaq/errors.hpp>

namespace etaq {

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

SurfaceGeometry graph_geometry(const GridField& u) {
  const int n = u.dim();
  const auto nodes = u.interior_nodes();
  const auto count = static_cast<Eigen::Index>(nodes.size());

  SurfaceGeometry geom;
  geom.nodes = nodes;
  geom.metric.reserve(nodes.size());
  geom.second_form.reserve(nodes.size());
  geom.kappa.resize(count, n);
  geom.eta.resize(count, n);
  geom.normal_height.resize(count);
  geom.tau.resize(count);
  geom.phi_value.resize(count);
  geom.positions.resize(count, n);
  geom.position_labels.resize(n);
  for (int a = 0; a < n; ++a)
    geom.position_labels[a] = "x" + std::to_string(a + 1);

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (Eigen::Index row = 0; row < count; ++row) {
    const auto node = nodes[static_cast<std::size_t>(row)];
    const auto d = discretize(u, node);
    const Eigen::VectorXd x = u.node_position(node);
    const double uval = u.value(node);
    const double w = std::sqrt(1.0 + d.grad.squaredNorm());

    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n) + d.grad * d.grad.transpose();
    Eigen::MatrixXd h = d.hess / w;
    eig.compute(h, g, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (eig.info() != Eigen::Success)
      throw error("graph_geometry: curvature eigenproblem failed");
    const Eigen::VectorXd ascending = eig.eigenvalues();

    double trace = 0.0;
    for (int i = 0; i < n; ++i) {
      geom.kappa(row, i) = ascending(n - 1 - i);
      trace += ascending(i);
    }
    for (int i = 0; i < n; ++i) geom.eta(row, i) = trace - geom.kappa(row, i);

    geom.normal_height(row) = 1.0 / w;
    geom.tau(row) = (uval - x.dot(d.grad)) / w;
    geom.phi_value(row) = 0.5 * (x.squaredNorm() + uval * uval);
    geom.positions.row(row) = x.transpose();
    geom.metric.push_back(std::move(g));
    geom.second_form.push_back(std::move(h));
  }
  return geom;
}

std::string surface_to_csv(const SurfaceGeometry& geom) {
  const int n = static_cast<int>(geom.kappa.cols());
  std::string out = "node";
  for (const auto& label : geom.position_labels) {
    out += ',';
    out += label;
  }
  for (int i = 0; i < n; ++i) out += ",kappa" + std::to_string(i + 1);
  for (int i = 0; i < n; ++i) out += ",eta" + std::to_string(i + 1);
  if (geom.normal_height.size() > 0) out += ",normal_height";
  out += ",tau,phi\n";

  const auto count = static_cast<Eigen::Index>(geom.nodes.size());
  for (Eigen::Index row = 0; row < count; ++row) {
    out += std::to_string(geom.nodes[static_cast<std::size_t>(row)]);
    for (Eigen::Index c = 0; c < geom.positions.cols(); ++c) {
      out += ',';
      append_number(out, geom.positions(row, c));
    }
    for (int i = 0; i < n; ++i) {
      out += ',';
      append_number(out, geom.kappa(row, i));
    }
    for (int i = 0; i < n; ++i) {
      out += ',';
      append_number(out, geom.eta(row, i));
    }
    if (geom.normal_height.size() > 0) {
      out += ',';
      append_number(out, geom.normal_height(row));
    }
    out += ',';
    append_number(out, geom.tau(row));
    out += ',';
    append_number(out, geom.phi_value(row));
    out += '\n';
  }
  return out;
}

}  // namespace etaq
