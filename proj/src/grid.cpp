#include <etaq/grid.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <utility>

#include <etaq/csv.hpp>

namespace etaq {

namespace {

constexpr double kBallShrink = 1.0 - 1e-12;

void check_dim_match(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     const char* what) {
  if (a.size() != b.size() || a.size() == 0) {
    throw input_error(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

DomainSpec DomainSpec::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  check_dim_match(lo, hi, "box domain");
  for (Eigen::Index a = 0; a < lo.size(); ++a) {
    if (!(lo(a) < hi(a))) throw input_error("box domain: lo must be below hi");
  }
  DomainSpec d;
  d.kind = DomainKind::Box;
  d.lo = lo;
  d.hi = hi;
  return d;
}

DomainSpec DomainSpec::ball(const Eigen::VectorXd& center, double radius) {
  if (center.size() == 0) throw input_error("ball domain: empty center");
  if (!(radius > 0.0)) throw input_error("ball domain: radius must be positive");
  DomainSpec d;
  d.kind = DomainKind::Ball;
  d.center = center;
  d.radius = radius;
  return d;
}

int DomainSpec::dim() const {
  return static_cast<int>(kind == DomainKind::Box ? lo.size() : center.size());
}

bool DomainSpec::inside(const Eigen::VectorXd& x) const {
  if (kind == DomainKind::Box) {
    for (Eigen::Index a = 0; a < lo.size(); ++a) {
      if (x(a) < lo(a) || x(a) > hi(a)) return false;
    }
    return true;
  }
  return (x - center).norm() < radius * kBallShrink;
}

void DomainSpec::hull(Eigen::VectorXd& lo_out, Eigen::VectorXd& hi_out) const {
  if (kind == DomainKind::Box) {
    lo_out = lo;
    hi_out = hi;
    return;
  }
  lo_out = center.array() - radius;
  hi_out = center.array() + radius;
}

GridField::GridField(DomainSpec domain, Eigen::VectorXi npts)
    : domain_(std::move(domain)), npts_(std::move(npts)) {
  const int n = domain_.dim();
  if (npts_.size() != n) throw input_error("grid: npts dimension mismatch");
  for (int a = 0; a < n; ++a) {
    if (npts_(a) < 3) throw input_error("grid: need at least 3 nodes per axis");
  }
  domain_.hull(lo_, hi_);

  h_ = (hi_(0) - lo_(0)) / (npts_(0) - 1);
  for (int a = 1; a < n; ++a) {
    const double ha = (hi_(a) - lo_(a)) / (npts_(a) - 1);
    if (std::abs(ha - h_) > 1e-12 * std::max(1.0, std::abs(h_))) {
      throw input_error("grid: spacing must agree across axes");
    }
  }

  strides_.assign(static_cast<std::size_t>(n), 1);
  for (int a = n - 2; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] =
        strides_[static_cast<std::size_t>(a + 1)] * npts_(a + 1);
  }
  std::int64_t total = strides_[0] * npts_(0);
  values_ = Eigen::VectorXd::Zero(total);
  classes_.assign(static_cast<std::size_t>(total), NodeClass::Exterior);

  // First pass: domain membership.  Box lattices lie entirely inside.
  std::vector<char> is_in(static_cast<std::size_t>(total), 0);
  for (std::int64_t id = 0; id < total; ++id) {
    is_in[static_cast<std::size_t>(id)] =
        domain_.kind == DomainKind::Box || domain_.inside(node_position(id)) ? 1 : 0;
  }

  // Second pass: interior means every stencil neighbor (axis steps and plane
  // diagonals) is itself inside; the rest of the inside nodes form the ring.
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (std::int64_t id = 0; id < total; ++id) {
    if (!is_in[static_cast<std::size_t>(id)]) continue;
    std::int64_t rem = id;
    bool full = true;
    for (int a = 0; a < n; ++a) {
      idx[static_cast<std::size_t>(a)] =
          static_cast<int>(rem / strides_[static_cast<std::size_t>(a)]);
      rem %= strides_[static_cast<std::size_t>(a)];
      if (idx[static_cast<std::size_t>(a)] == 0 ||
          idx[static_cast<std::size_t>(a)] == npts_(a) - 1) {
        full = false;  // lattice edge: some neighbor is off the lattice
      }
    }
    if (full && domain_.kind == DomainKind::Ball) {
      for (int a = 0; a < n && full; ++a) {
        for (int da : {-1, 1}) {
          const std::int64_t nb = id + da * strides_[static_cast<std::size_t>(a)];
          if (!is_in[static_cast<std::size_t>(nb)]) {
            full = false;
            break;
          }
        }
      }
      for (int a = 0; a < n && full; ++a) {
        for (int b = a + 1; b < n && full; ++b) {
          for (int da : {-1, 1}) {
            for (int db : {-1, 1}) {
              const std::int64_t nb = id + da * strides_[static_cast<std::size_t>(a)] +
                                      db * strides_[static_cast<std::size_t>(b)];
              if (!is_in[static_cast<std::size_t>(nb)]) {
                full = false;
                break;
              }
            }
            if (!full) break;
          }
        }
      }
    }
    classes_[static_cast<std::size_t>(id)] = full ? NodeClass::Interior : NodeClass::Ring;
    (full ? interior_ : ring_).push_back(id);
  }
}

Eigen::VectorXd GridField::node_position(std::int64_t node) const {
  const int n = dim();
  Eigen::VectorXd x(n);
  std::int64_t rem = node;
  for (int a = 0; a < n; ++a) {
    const std::int64_t ia = rem / strides_[static_cast<std::size_t>(a)];
    rem %= strides_[static_cast<std::size_t>(a)];
    x(a) = lo_(a) + h_ * static_cast<double>(ia);
  }
  return x;
}

std::int64_t GridField::neighbor(std::int64_t node, int axis, int delta) const {
  if (axis < 0 || axis >= dim()) throw index_error("grid neighbor: axis out of range");
  const std::int64_t stride = strides_[static_cast<std::size_t>(axis)];
  const int ia = static_cast<int>((node / stride) % npts_(axis));
  const int target = ia + delta;
  if (target < 0 || target >= npts_(axis)) return -1;
  return node + static_cast<std::int64_t>(delta) * stride;
}

void GridField::fill(const std::function<double(const Eigen::VectorXd&)>& fn) {
  for (std::int64_t id = 0; id < size(); ++id) {
    if (classes_[static_cast<std::size_t>(id)] == NodeClass::Exterior) continue;
    values_(id) = fn(node_position(id));
  }
}

NodeDerivatives discretize(const GridField& u, std::int64_t node) {
  if (node < 0 || node >= u.size()) throw index_error("discretize: node out of range");
  if (u.classify(node) != NodeClass::Interior) {
    throw stencil_error("discretize: node lacks a full interior stencil");
  }
  const int n = u.dim();
  const double h = u.spacing();
  NodeDerivatives d;
  d.grad.resize(n);
  d.hess.resize(n, n);
  const double uc = u.value(node);
  for (int a = 0; a < n; ++a) {
    const std::int64_t ap = u.neighbor(node, a, 1);
    const std::int64_t am = u.neighbor(node, a, -1);
    d.grad(a) = (u.value(ap) - u.value(am)) / (2.0 * h);
    d.hess(a, a) = (u.value(ap) - 2.0 * uc + u.value(am)) / (h * h);
    for (int b = a + 1; b < n; ++b) {
      const double upp = u.value(u.neighbor(ap, b, 1));
      const double upm = u.value(u.neighbor(ap, b, -1));
      const double ump = u.value(u.neighbor(am, b, 1));
      const double umm = u.value(u.neighbor(am, b, -1));
      d.hess(a, b) = (upp + umm - upm - ump) / (4.0 * h * h);
      d.hess(b, a) = d.hess(a, b);
    }
  }
  return d;
}

MonitorReport monitor_estimates(const GridField& u, double beta) {
  if (!(beta >= 0.0)) throw input_error("monitor_estimates: beta must be nonnegative");
  const DomainSpec& dom = u.domain();
  Eigen::VectorXd lo, hi;
  dom.hull(lo, hi);
  const Eigen::VectorXd mid = 0.5 * (lo + hi);
  const Eigen::VectorXd quarter = 0.25 * (hi - lo);

  MonitorReport m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (std::int64_t id : u.interior_nodes()) {
    const NodeDerivatives d = discretize(u, id);
    eig.compute(d.hess, Eigen::EigenvaluesOnly);
    const double specrad = eig.eigenvalues().cwiseAbs().maxCoeff();
    m.global_sup = std::max(m.global_sup, specrad);

    const Eigen::VectorXd x = u.node_position(id);
    bool inner = true;
    if (dom.kind == DomainKind::Ball) {
      inner = (x - dom.center).norm() <= 0.5 * dom.radius * (1.0 + 1e-12);
    } else {
      for (int a = 0; a < u.dim(); ++a) {
        if (std::abs(x(a) - mid(a)) > quarter(a) * (1.0 + 1e-12)) inner = false;
      }
    }
    if (inner) m.interior_sup = std::max(m.interior_sup, specrad);

    const double depth = std::max(-u.value(id), 0.0);
    m.pogorelov_sup = std::max(m.pogorelov_sup, std::pow(depth, beta) * specrad);
  }
  return m;
}

std::string field_to_csv(const GridField& u) {
  csv::Writer w;
  w.cell("node");
  for (int a = 0; a < u.dim(); ++a) w.cell("x" + std::to_string(a + 1));
  w.cell("value");
  w.cell("class");
  w.endrow();
  for (std::int64_t id = 0; id < u.size(); ++id) {
    w.cell(static_cast<std::int64_t>(id));
    const Eigen::VectorXd x = u.node_position(id);
    for (int a = 0; a < u.dim(); ++a) w.cell(x(a));
    w.cell(u.value(id));
    switch (u.classify(id)) {
      case NodeClass::Interior: w.cell("interior"); break;
      case NodeClass::Ring: w.cell("ring"); break;
      case NodeClass::Exterior: w.cell("exterior"); break;
    }
    w.endrow();
  }
  return w.str();
}

}  // namespace etaq
