#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <etaq/errors.hpp>

namespace etaq {

enum class DomainKind { Box, Ball };

/// Axis-aligned box or round ball, the two Dirichlet domains the grid layer
/// understands.  Membership for balls is strict with a 1e-12 relative shrink
/// so lattice nodes landing on the sphere count as outside.
struct DomainSpec {
  DomainKind kind = DomainKind::Box;
  Eigen::VectorXd lo;      // box corner
  Eigen::VectorXd hi;      // box corner
  Eigen::VectorXd center;  // ball center
  double radius = 0.0;

  static DomainSpec box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
  static DomainSpec ball(const Eigen::VectorXd& center, double radius);

  int dim() const;
  bool inside(const Eigen::VectorXd& x) const;
  /// Bounding box: the box itself, or the ball's circumscribed cube.
  void hull(Eigen::VectorXd& lo_out, Eigen::VectorXd& hi_out) const;
};

/// Interior nodes carry the full compact stencil (axis neighbors plus plane
/// diagonals); ring nodes are inside the domain but too close to the boundary
/// for that stencil and hold Dirichlet data instead.
enum class NodeClass : std::uint8_t { Exterior, Ring, Interior };

/// Scalar samples on a uniform lattice over the domain hull.  The spacing is
/// required to agree across axes so second differences share one step.
class GridField {
 public:
  GridField(DomainSpec domain, Eigen::VectorXi npts);

  int dim() const { return static_cast<int>(npts_.size()); }
  double spacing() const { return h_; }
  const DomainSpec& domain() const { return domain_; }
  const Eigen::VectorXi& shape() const { return npts_; }
  std::int64_t size() const { return values_.size(); }

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  double value(std::int64_t node) const { return values_(node); }
  void set_value(std::int64_t node, double v) { values_(node) = v; }

  Eigen::VectorXd node_position(std::int64_t node) const;
  NodeClass classify(std::int64_t node) const { return classes_[static_cast<std::size_t>(node)]; }
  const std::vector<std::int64_t>& interior_nodes() const { return interior_; }
  const std::vector<std::int64_t>& ring_nodes() const { return ring_; }

  /// Lattice neighbor `delta` steps along `axis`, or -1 off the lattice.
  std::int64_t neighbor(std::int64_t node, int axis, int delta) const;

  /// Samples fn at every non-exterior node; exterior values stay zero and are
  /// never read by stencils.
  void fill(const std::function<double(const Eigen::VectorXd&)>& fn);

 private:
  DomainSpec domain_;
  Eigen::VectorXi npts_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
  double h_ = 0.0;
  std::vector<std::int64_t> strides_;
  Eigen::VectorXd values_;
  std::vector<NodeClass> classes_;
  std::vector<std::int64_t> interior_;
  std::vector<std::int64_t> ring_;
};

struct NodeDerivatives {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// Central differences at an interior node: gradient to O(h^2), Hessian
/// diagonal via the 3-point second difference, off-diagonal via the 4-point
/// cross.  Non-interior nodes raise stencil_error.
NodeDerivatives discretize(const GridField& u, std::int64_t node);

struct MonitorReport {
  double global_sup = 0.0;     // sup over interior nodes of |D^2 u| spectral radius
  double interior_sup = 0.0;   // same sup restricted to the centered half-domain
  double pogorelov_sup = 0.0;  // sup of max(-u, 0)^beta times that spectral radius
};

/// Curvature-size monitors used to track a solve; beta must be nonnegative.
MonitorReport monitor_estimates(const GridField& u, double beta);

std::string field_to_csv(const GridField& u);

}  // namespace etaq
