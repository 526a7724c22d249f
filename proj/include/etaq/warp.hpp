#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

#include <etaq/errors.hpp>
#include <etaq/expression.hpp>
#include <etaq/spectrum.hpp>

namespace etaq {

enum class WarpKind { Linear, Sine, Sinh, Custom };

/// Warping profile phi(r) on a working interval, with phi > 0 and phi' > 0
/// enforced by dense sampling at construction.  The three named profiles are
/// the space forms (curvature 0, +1, -1) and carry closed-form derived data;
/// custom profiles come from an expression in r, with the slope taken
/// symbolically and the antiderivative by quadrature from the interval start.
class WarpModel {
 public:
  static WarpModel linear(double lo, double hi);
  static WarpModel sine(double lo, double hi);
  static WarpModel hyperbolic(double lo, double hi);
  static WarpModel custom(expr::Expression phi, double lo, double hi);

  WarpKind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool contains(double r) const { return r >= lo_ - 1e-12 && r <= hi_ + 1e-12; }

  /// phi(r); r outside the working interval raises input_error.
  double phi(double r) const;
  /// phi'(r).
  double dphi(double r) const;
  /// phi'(r)/phi(r), the geodesic-sphere principal curvature.
  double ratio(double r) const;
  /// Antiderivative of phi: from 0 for the named profiles (r^2/2, 1 - cos r,
  /// cosh r - 1), from the interval start for custom ones.  Only differences
  /// and derivatives of this value enter any identity.
  double integral(double r) const;

  /// Sectional curvature of the ambient space form, when this profile is one.
  std::optional<double> space_form() const;

 private:
  WarpModel(WarpKind kind, double lo, double hi, std::optional<expr::Expression> phi,
            std::optional<expr::Expression> dphi);
  void check_range(double r) const;

  WarpKind kind_;
  double lo_;
  double hi_;
  std::optional<expr::Expression> phi_;
  std::optional<expr::Expression> dphi_;
};

/// Exact quotient value of the geodesic sphere {r = r0}:
/// [C(n,k)/C(n,l)] * [(n-1) * phi'(r0)/phi(r0)]^(k-l).  This is also the
/// barrier threshold at radius r0.
double sphere_oracle(const WarpModel& warp, double r0, const QuotientOp& op);

/// Three-condition barrier report: psi above the sphere threshold inside r1,
/// below it outside r2, and phi^(k-l)*psi non-increasing between.  Margins
/// are minima over the sampled grid; inner/outer demand strict positivity,
/// the slope condition allows zero (up to roundoff slack).
struct BarrierReport {
  double inner_margin = 0.0;
  double outer_margin = 0.0;
  double monotone_margin = 0.0;
  bool inner_ok = false;
  bool outer_ok = false;
  bool monotone_ok = false;
  Eigen::VectorXd sample_r;
  Eigen::VectorXd sample_psi;
  Eigen::VectorXd sample_threshold;
};

BarrierReport barrier_check(const WarpModel& warp, const expr::Expression& psi,
                            double r1, double r2, const QuotientOp& op,
                            int samples = 512);

std::string barrier_to_csv(const BarrierReport& report);

}  // namespace etaq
