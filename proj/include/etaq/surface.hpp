#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include <etaq/grid.hpp>

namespace etaq {

/// Pointwise extrinsic geometry of a hypersurface sample: induced metric,
/// second fundamental form, principal curvatures (descending), the transform
/// eigenvalues eta_i = sum(kappa) - kappa_i aligned with that order, and the
/// support data tau and Phi.  normal_height carries nu^{n+1} for Euclidean
/// graphs and stays empty for radial graphs.
struct SurfaceGeometry {
  std::vector<std::int64_t> nodes;
  std::vector<Eigen::MatrixXd> metric;
  std::vector<Eigen::MatrixXd> second_form;
  Eigen::MatrixXd kappa;
  Eigen::MatrixXd eta;
  Eigen::VectorXd normal_height;
  Eigen::VectorXd tau;
  Eigen::VectorXd phi_value;
  /// One row per node; labeled by position_labels (x1... for graphs,
  /// lat/lon/r for radial graphs).
  Eigen::MatrixXd positions;
  std::vector<std::string> position_labels;
};

/// Geometry of the graph {(x, u(x))} over the interior nodes: g = I + Du Du^T,
/// h = D2u / W with W = sqrt(1 + |Du|^2), kappa from det(h - kappa g) = 0,
/// nu^{n+1} = 1/W, tau = <X, nu> for the upward normal, Phi = |X|^2/2.
SurfaceGeometry graph_geometry(const GridField& u);

std::string surface_to_csv(const SurfaceGeometry& geom);

}  // namespace etaq
