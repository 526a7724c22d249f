#include <etaq/identities.hpp>

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include <etaq/errors.hpp>
#include <etaq/eta_operator.hpp>
#include <etaq/surface.hpp>
#include <etaq/symfunc.hpp>

namespace etaq {

namespace {

// One-axis central-difference stencils for pure derivatives of order 0..4,
// exact on polynomials of matching degree.  Offsets stay within two lattice
// steps, which fixes the inner-node mask used below.
struct AxisStencil {
  int count;
  std::array<int, 5> offset;
  std::array<double, 5> coeff;
};

const AxisStencil& axis_stencil(int order) {
  static const std::array<AxisStencil, 5> table = {{
      {1, {0, 0, 0, 0, 0}, {1.0, 0.0, 0.0, 0.0, 0.0}},
      {2, {1, -1, 0, 0, 0}, {0.5, -0.5, 0.0, 0.0, 0.0}},
      {3, {1, 0, -1, 0, 0}, {1.0, -2.0, 1.0, 0.0, 0.0}},
      {4, {2, 1, -1, -2, 0}, {0.5, -1.0, 1.0, -0.5, 0.0}},
      {5, {2, 1, 0, -1, -2}, {1.0, -4.0, 6.0, -4.0, 1.0}},
  }};
  return table[static_cast<std::size_t>(order)];
}

std::int64_t offset_node(const GridField& u, std::int64_t node, const std::vector<int>& delta) {
  std::int64_t id = node;
  for (int a = 0; a < static_cast<int>(delta.size()) && id >= 0; ++a)
    if (delta[static_cast<std::size_t>(a)] != 0)
      id = u.neighbor(id, a, delta[static_cast<std::size_t>(a)]);
  return id;
}

bool has_jet_stencil(const GridField& u, std::int64_t node) {
  const int n = u.dim();
  if (u.classify(node) != NodeClass::Interior) return false;
  std::vector<int> delta(static_cast<std::size_t>(n), -2);
  while (true) {
    const auto id = offset_node(u, node, delta);
    if (id < 0 || u.classify(id) == NodeClass::Exterior) return false;
    int a = 0;
    for (; a < n; ++a) {
      if (delta[static_cast<std::size_t>(a)] < 2) {
        ++delta[static_cast<std::size_t>(a)];
        break;
      }
      delta[static_cast<std::size_t>(a)] = -2;
    }
    if (a == n) break;
  }
  return true;
}

std::vector<std::int64_t> jet_nodes(const GridField& u) {
  std::vector<std::int64_t> out;
  for (const auto node : u.interior_nodes())
    if (has_jet_stencil(u, node)) out.push_back(node);
  return out;
}

// Mixed partial of u with the given per-axis derivative multiplicities,
// assembled as a tensor product of one-axis stencils.
double mixed_difference(const GridField& u, std::int64_t node, const std::vector<int>& mult) {
  const int n = u.dim();
  int total = 0;
  for (int a = 0; a < n; ++a) total += mult[static_cast<std::size_t>(a)];
  std::vector<int> delta(static_cast<std::size_t>(n), 0);

  double sum = 0.0;
  // Odometer over the product stencil, one digit per axis.
  std::vector<int> digit(static_cast<std::size_t>(n), 0);
  while (true) {
    double coeff = 1.0;
    for (int a = 0; a < n; ++a) {
      const auto& st = axis_stencil(mult[static_cast<std::size_t>(a)]);
      const int d = digit[static_cast<std::size_t>(a)];
      delta[static_cast<std::size_t>(a)] = st.offset[static_cast<std::size_t>(d)];
      coeff *= st.coeff[static_cast<std::size_t>(d)];
    }
    sum += coeff * u.value(offset_node(u, node, delta));
    int a = 0;
    for (; a < n; ++a) {
      const auto& st = axis_stencil(mult[static_cast<std::size_t>(a)]);
      if (digit[static_cast<std::size_t>(a)] + 1 < st.count) {
        ++digit[static_cast<std::size_t>(a)];
        break;
      }
      digit[static_cast<std::size_t>(a)] = 0;
    }
    if (a == n) break;
  }
  return sum / std::pow(u.spacing(), total);
}

// All coordinate partials of the height function up to fourth order at one
// node, plus the chain-rule fields built from them.  Writing h, nabla h and
// nabla^2 h as closed forms in these differences (rather than differencing
// the h field itself) keeps quadratic graphs exact to roundoff: their third
// and fourth differences vanish identically.
struct GraphJet {
  int n = 0;
  double w = 0.0;
  Eigen::VectorXd d1;
  Eigen::MatrixXd d2;
  std::vector<double> d3;  // [a*n*n + b*n + c]
  std::vector<double> d4;  // [((a*n + b)*n + c)*n + e]

  Eigen::MatrixXd g;       // induced metric
  Eigen::MatrixXd h;       // second fundamental form
  Eigen::VectorXd wd;      // dW/dx_a
  Eigen::MatrixXd wdd;     // d2W/dx_a dx_b
  std::vector<double> s;   // covariant (nabla_c h)_{ab}, [c*n*n + a*n + b]
  std::vector<double> t2;  // covariant (nabla_e nabla_c h)_{ab}

  double at3(int a, int b, int c) const { return d3[static_cast<std::size_t>((a * n + b) * n + c)]; }
  double at4(int a, int b, int c, int e) const {
    return d4[static_cast<std::size_t>(((a * n + b) * n + c) * n + e)];
  }
  double sv(int c, int a, int b) const { return s[static_cast<std::size_t>((c * n + a) * n + b)]; }
  double t2v(int e, int c, int a, int b) const {
    return t2[static_cast<std::size_t>((((e * n) + c) * n + a) * n + b)];
  }
  double gamma(int m, int a, int b) const { return d1(m) * d2(a, b) / (w * w); }
  double gamma_d(int e, int m, int a, int b) const {
    return (d2(m, e) * d2(a, b) + d1(m) * at3(a, b, e)) / (w * w) -
           2.0 * d1(m) * d2(a, b) * wd(e) / (w * w * w);
  }
};

GraphJet build_jet(const GridField& u, std::int64_t node) {
  const int n = u.dim();
  GraphJet jet;
  jet.n = n;
  jet.d1.resize(n);
  jet.d2.resize(n, n);
  jet.d3.assign(static_cast<std::size_t>(n * n * n), 0.0);
  jet.d4.assign(static_cast<std::size_t>(n * n * n * n), 0.0);

  std::map<std::vector<int>, double> cache;
  auto deriv = [&](std::vector<int> mult) {
    auto it = cache.find(mult);
    if (it != cache.end()) return it->second;
    const double v = mixed_difference(u, node, mult);
    cache.emplace(std::move(mult), v);
    return v;
  };
  auto mult_of = [n](std::initializer_list<int> axes) {
    std::vector<int> m(static_cast<std::size_t>(n), 0);
    for (int a : axes) ++m[static_cast<std::size_t>(a)];
    return m;
  };

  for (int a = 0; a < n; ++a) {
    jet.d1(a) = deriv(mult_of({a}));
    for (int b = 0; b < n; ++b) {
      jet.d2(a, b) = deriv(mult_of({a, b}));
      for (int c = 0; c < n; ++c) {
        jet.d3[static_cast<std::size_t>((a * n + b) * n + c)] = deriv(mult_of({a, b, c}));
        for (int e = 0; e < n; ++e)
          jet.d4[static_cast<std::size_t>(((a * n + b) * n + c) * n + e)] =
              deriv(mult_of({a, b, c, e}));
      }
    }
  }

  const double w2 = 1.0 + jet.d1.squaredNorm();
  jet.w = std::sqrt(w2);
  jet.g = Eigen::MatrixXd::Identity(n, n) + jet.d1 * jet.d1.transpose();
  jet.h = jet.d2 / jet.w;

  jet.wd.resize(n);
  for (int c = 0; c < n; ++c) jet.wd(c) = jet.d1.dot(jet.d2.col(c)) / jet.w;
  jet.wdd.resize(n, n);
  for (int c = 0; c < n; ++c)
    for (int e = 0; e < n; ++e) {
      double acc = 0.0;
      for (int d = 0; d < n; ++d) acc += jet.d2(d, e) * jet.d2(d, c) + jet.d1(d) * jet.at3(d, c, e);
      jet.wdd(c, e) = acc / jet.w - jet.wd(c) * jet.wd(e) / jet.w;
    }

  // (nabla_c h)_{ab} = d_c h_ab - Gamma^d_{ca} h_db - Gamma^d_{cb} h_ad.
  jet.s.assign(static_cast<std::size_t>(n * n * n), 0.0);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double v = jet.at3(a, b, c) / jet.w - jet.d2(a, b) * jet.wd(c) / w2;
        for (int d = 0; d < n; ++d)
          v -= jet.gamma(d, c, a) * jet.h(d, b) + jet.gamma(d, c, b) * jet.h(a, d);
        jet.s[static_cast<std::size_t>((c * n + a) * n + b)] = v;
      }

  // (nabla_e nabla_c h)_{ab}: coordinate derivative of nabla h minus the
  // three Christoffel corrections for the slots of the rank-3 tensor.
  jet.t2.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int e = 0; e < n; ++e)
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          // d_e of the coordinate expression for S(c,a,b).
          double hp_e = jet.at4(a, b, c, e) / jet.w -
                        (jet.at3(a, b, c) * jet.wd(e) + jet.at3(a, b, e) * jet.wd(c) +
                         jet.d2(a, b) * jet.wdd(c, e)) /
                            w2 +
                        2.0 * jet.d2(a, b) * jet.wd(c) * jet.wd(e) / (w2 * jet.w);
          for (int d = 0; d < n; ++d) {
            const double hp_db = jet.at3(d, b, e) / jet.w - jet.d2(d, b) * jet.wd(e) / w2;
            const double hp_ad = jet.at3(a, d, e) / jet.w - jet.d2(a, d) * jet.wd(e) / w2;
            hp_e -= jet.gamma_d(e, d, c, a) * jet.h(d, b) + jet.gamma(d, c, a) * hp_db;
            hp_e -= jet.gamma_d(e, d, c, b) * jet.h(a, d) + jet.gamma(d, c, b) * hp_ad;
          }
          double v = hp_e;
          for (int d = 0; d < n; ++d) {
            v -= jet.gamma(d, e, c) * jet.sv(d, a, b);
            v -= jet.gamma(d, e, a) * jet.sv(c, d, b);
            v -= jet.gamma(d, e, b) * jet.sv(c, a, d);
          }
          jet.t2[static_cast<std::size_t>((((e * n) + c) * n + a) * n + b)] = v;
        }

  return jet;
}

// g-orthonormal principal frame, columns ordered by descending curvature.
struct PrincipalFrame {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd kappa;
};

PrincipalFrame principal_frame(const GraphJet& jet) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(jet.h, jet.g);
  if (eig.info() != Eigen::Success)
    throw error("principal_frame: curvature eigenproblem failed");
  const int n = jet.n;
  PrincipalFrame frame;
  frame.vectors.resize(n, n);
  frame.kappa.resize(n);
  for (int i = 0; i < n; ++i) {
    frame.vectors.col(i) = eig.eigenvectors().col(n - 1 - i);
    frame.kappa(i) = eig.eigenvalues()(n - 1 - i);
  }
  return frame;
}

Eigen::MatrixXd frame_hessian_diagonal(const GraphJet& jet, const PrincipalFrame& frame) {
  const int n = jet.n;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int e = 0; e < n; ++e)
        for (int c = 0; c < n; ++c)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              acc += jet.t2v(e, c, a, b) * frame.vectors(e, j) * frame.vectors(c, j) *
                     frame.vectors(a, i) * frame.vectors(b, i);
      m(i, j) = acc;
    }
  return m;
}

}  // namespace

CommutatorReport verify_commutator(const GridField& u) {
  const auto nodes = jet_nodes(u);
  if (nodes.empty())
    throw stencil_error("verify_commutator: no node carries the two-layer difference stencil");

  CommutatorReport report;
  report.nodes_used = static_cast<std::int64_t>(nodes.size());
  const int n = u.dim();
  for (const auto node : nodes) {
    const GraphJet jet = build_jet(u, node);
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          report.codazzi_sup =
              std::max(report.codazzi_sup, std::abs(jet.sv(c, a, b) - jet.sv(b, a, c)));

    const PrincipalFrame frame = principal_frame(jet);
    const Eigen::MatrixXd m = frame_hessian_diagonal(jet, frame);
    const double k1 = frame.kappa(0);
    for (int i = 1; i < n; ++i) {
      const double ki = frame.kappa(i);
      const double residual = m(i, 0) - m(0, i) - k1 * ki * ki + k1 * k1 * ki;
      report.interchange_sup = std::max(report.interchange_sup, std::abs(residual));
    }
  }
  return report;
}

Eigen::MatrixXd shape_hessian_diagonal(const GridField& u, std::int64_t node) {
  if (!has_jet_stencil(u, node))
    throw stencil_error("shape_hessian_diagonal: node lacks the two-layer difference stencil");
  const GraphJet jet = build_jet(u, node);
  return frame_hessian_diagonal(jet, principal_frame(jet));
}

SuwReport verify_suw_identity(const GridField& u, const QuotientOp& op, double kappa_shift) {
  if (kappa_shift < 0.0)
    throw input_error("verify_suw_identity: kappa_shift must be nonnegative");
  const auto nodes = jet_nodes(u);
  if (nodes.empty())
    throw stencil_error("verify_suw_identity: no node carries the two-layer difference stencil");

  const int n = u.dim();
  const SurfaceGeometry geom = graph_geometry(u);
  std::vector<Eigen::Index> row_of(static_cast<std::size_t>(u.size()), -1);
  for (std::size_t i = 0; i < geom.nodes.size(); ++i)
    row_of[static_cast<std::size_t>(geom.nodes[i])] = static_cast<Eigen::Index>(i);

  // Manufactured right-hand side f(x) = quotient(op, kappa(x) + shift) on the
  // interior; consumed by central differences at the jet nodes.
  Eigen::VectorXd f_field = Eigen::VectorXd::Zero(u.size());
  for (std::size_t i = 0; i < geom.nodes.size(); ++i) {
    Eigen::VectorXd kappa = geom.kappa.row(static_cast<Eigen::Index>(i)).transpose();
    kappa.array() += kappa_shift;
    const auto cone = cone_contains(op.k, kappa);
    if (!cone.contained)
      throw admissibility_error("verify_suw_identity: curvature spectrum leaves the cone",
                                cone.first_failure,
                                cone.sigmas(cone.first_failure - 1));
    f_field(geom.nodes[i]) = quotient(op, kappa);
  }

  SuwReport report;
  report.nodes_used = static_cast<std::int64_t>(nodes.size());
  report.regularized = kappa_shift > 0.0;

  const double spacing = u.spacing();
  for (const auto node : nodes) {
    const GraphJet jet = build_jet(u, node);
    const PrincipalFrame frame = principal_frame(jet);
    Eigen::VectorXd kappa = frame.kappa;
    kappa.array() += kappa_shift;
    const Eigen::VectorXd fk = quotient_gradient(op, kappa);

    // Covariant Hessian of nu = 1/W from the same closed-form chain rule.
    const double w = jet.w;
    const double w2 = w * w;
    Eigen::VectorXd nu_d(n);
    for (int a = 0; a < n; ++a) nu_d(a) = -jet.wd(a) / w2;
    Eigen::MatrixXd nu_hess(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double v = -jet.wdd(a, b) / w2 + 2.0 * jet.wd(a) * jet.wd(b) / (w2 * w);
        for (int c = 0; c < n; ++c) v -= jet.gamma(c, a, b) * nu_d(c);
        nu_hess(a, b) = v;
      }

    double lhs = 0.0;
    const double nu = 1.0 / w;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd e = frame.vectors.col(i);
      lhs += fk(i) * (e.dot(nu_hess * e) + kappa(i) * kappa(i) * nu);
    }

    Eigen::VectorXd f_grad(n);
    for (int a = 0; a < n; ++a) {
      const auto plus = u.neighbor(node, a, 1);
      const auto minus = u.neighbor(node, a, -1);
      if (plus < 0 || minus < 0 || row_of[static_cast<std::size_t>(plus)] < 0 ||
          row_of[static_cast<std::size_t>(minus)] < 0)
        throw stencil_error("verify_suw_identity: right-hand side stencil leaves the interior");
      f_grad(a) = (f_field(plus) - f_field(minus)) / (2.0 * spacing);
    }
    // -<surface gradient of f, e_{n+1}> = -g^{ab} d_a f u_b, and the inverse
    // graph metric contracts to a plain 1/W^2 factor.
    const double rhs = -f_grad.dot(jet.d1) / w2;

    report.residual_sup = std::max(report.residual_sup, std::abs(lhs - rhs));
  }
  return report;
}

}  // namespace etaq
