#include <etaq/warp.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include <etaq/csv.hpp>

namespace etaq {

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b *= static_cast<double>(n - k + i) / i;
  return b;
}

double eval_in_r(const expr::Expression& e, double r) {
  expr::EvalContext ctx;
  ctx.bind_r(r);
  return e.eval(ctx);
}

}  // namespace

WarpModel::WarpModel(WarpKind kind, double lo, double hi,
                     std::optional<expr::Expression> phi,
                     std::optional<expr::Expression> dphi)
    : kind_(kind), lo_(lo), hi_(hi), phi_(std::move(phi)), dphi_(std::move(dphi)) {
  if (!(lo < hi)) throw input_error("warp: interval must satisfy lo < hi");
  // Positivity and monotonicity are sampled densely rather than proved.
  constexpr int kProbe = 257;
  for (int i = 0; i < kProbe; ++i) {
    const double r = lo_ + (hi_ - lo_) * static_cast<double>(i) / (kProbe - 1);
    if (!(this->phi(r) > 0.0)) {
      throw input_error("warp: phi must be positive on the working interval");
    }
    if (!(this->dphi(r) > 0.0)) {
      throw input_error("warp: phi must be increasing on the working interval");
    }
  }
}

WarpModel WarpModel::linear(double lo, double hi) {
  return WarpModel(WarpKind::Linear, lo, hi, std::nullopt, std::nullopt);
}

WarpModel WarpModel::sine(double lo, double hi) {
  return WarpModel(WarpKind::Sine, lo, hi, std::nullopt, std::nullopt);
}

WarpModel WarpModel::hyperbolic(double lo, double hi) {
  return WarpModel(WarpKind::Sinh, lo, hi, std::nullopt, std::nullopt);
}

WarpModel WarpModel::custom(expr::Expression phi, double lo, double hi) {
  expr::Expression slope = expr::derivative(phi, "r");
  return WarpModel(WarpKind::Custom, lo, hi, std::move(phi), std::move(slope));
}

void WarpModel::check_range(double r) const {
  if (!contains(r)) {
    throw input_error("warp: radius outside the working interval");
  }
}

double WarpModel::phi(double r) const {
  check_range(r);
  switch (kind_) {
    case WarpKind::Linear: return r;
    case WarpKind::Sine: return std::sin(r);
    case WarpKind::Sinh: return std::sinh(r);
    case WarpKind::Custom: return eval_in_r(*phi_, r);
  }
  return 0.0;
}

double WarpModel::dphi(double r) const {
  check_range(r);
  switch (kind_) {
    case WarpKind::Linear: return 1.0;
    case WarpKind::Sine: return std::cos(r);
    case WarpKind::Sinh: return std::cosh(r);
    case WarpKind::Custom: return eval_in_r(*dphi_, r);
  }
  return 0.0;
}

double WarpModel::ratio(double r) const { return dphi(r) / phi(r); }

double WarpModel::integral(double r) const {
  check_range(r);
  switch (kind_) {
    case WarpKind::Linear: return r * r / 2.0;
    case WarpKind::Sine: return 1.0 - std::cos(r);
    case WarpKind::Sinh: return std::cosh(r) - 1.0;
    case WarpKind::Custom: break;
  }
  // Composite Simpson from the interval start.
  constexpr int kPanels = 256;
  const double a = lo_;
  const double step = (r - a) / (2 * kPanels);
  double sum = eval_in_r(*phi_, a) + eval_in_r(*phi_, r);
  for (int i = 1; i < 2 * kPanels; ++i) {
    sum += eval_in_r(*phi_, a + step * i) * (i % 2 ? 4.0 : 2.0);
  }
  return sum * step / 3.0;
}

std::optional<double> WarpModel::space_form() const {
  switch (kind_) {
    case WarpKind::Linear: return 0.0;
    case WarpKind::Sine: return 1.0;
    case WarpKind::Sinh: return -1.0;
    case WarpKind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

double sphere_oracle(const WarpModel& warp, double r0, const QuotientOp& op) {
  const double level = (op.n - 1) * warp.ratio(r0);
  return binomial(op.n, op.k) / binomial(op.n, op.l) *
         std::pow(level, static_cast<double>(op.k - op.l));
}

BarrierReport barrier_check(const WarpModel& warp, const expr::Expression& psi,
                            double r1, double r2, const QuotientOp& op, int samples) {
  if (!(r1 < r2) || !warp.contains(r1) || !warp.contains(r2)) {
    throw input_error("barrier: need r1 < r2 inside the warp interval");
  }
  if (samples < 2) throw input_error("barrier: need at least 2 samples");

  const double power = static_cast<double>(op.k - op.l);
  auto psi_at = [&](double r) { return eval_in_r(psi, r); };
  auto threshold_at = [&](double r) { return sphere_oracle(warp, r, op); };

  BarrierReport rep;
  std::vector<double> rs, ps, ts;
  auto scan = [&](double a, double b, auto margin_fn) {
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
      const double r =
          samples == 1 ? a : a + (b - a) * static_cast<double>(i) / (samples - 1);
      margin = std::min(margin, margin_fn(r));
      rs.push_back(r);
      ps.push_back(psi_at(r));
      ts.push_back(threshold_at(r));
    }
    return margin;
  };

  rep.inner_margin = scan(warp.lo(), r1, [&](double r) { return psi_at(r) - threshold_at(r); });
  rep.outer_margin = scan(r2, warp.hi(), [&](double r) { return threshold_at(r) - psi_at(r); });
  // Central-difference slope of phi^(k-l) * psi, kept inside (r1, r2).  The
  // step balances truncation against cancellation so zero-slope profiles
  // stay well above the roundoff slack.
  const double fd = (r2 - r1) * 1e-4;
  rep.monotone_margin = scan(r1 + fd, r2 - fd, [&](double r) {
    const double up = std::pow(warp.phi(r + fd), power) * psi_at(r + fd);
    const double dn = std::pow(warp.phi(r - fd), power) * psi_at(r - fd);
    return -(up - dn) / (2.0 * fd);
  });

  rep.inner_ok = rep.inner_margin > 0.0;
  rep.outer_ok = rep.outer_margin > 0.0;
  rep.monotone_ok = rep.monotone_margin >= -1e-10;

  rep.sample_r = Eigen::Map<Eigen::VectorXd>(rs.data(), static_cast<Eigen::Index>(rs.size()));
  rep.sample_psi = Eigen::Map<Eigen::VectorXd>(ps.data(), static_cast<Eigen::Index>(ps.size()));
  rep.sample_threshold =
      Eigen::Map<Eigen::VectorXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
  return rep;
}

std::string barrier_to_csv(const BarrierReport& report) {
  csv::Writer w;
  w.line("condition,margin,holds");
  auto row = [&](const char* name, double margin, bool ok) {
    w.cell(name);
    w.cell(margin);
    w.cell(static_cast<std::int64_t>(ok ? 1 : 0));
    w.endrow();
  };
  row("inner", report.inner_margin, report.inner_ok);
  row("outer", report.outer_margin, report.outer_ok);
  row("monotone", report.monotone_margin, report.monotone_ok);
  return w.str();
}

}  // namespace etaq
