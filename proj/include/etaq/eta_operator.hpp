#pragma once

#include <Eigen/Dense>

#include <etaq/spectrum.hpp>
#include <etaq/symfunc.hpp>

namespace etaq {

/// Coefficients of the extended transform U = theta*tr(W)*I - mu*W + chi.
/// Requires theta > 0 and theta >= mu; an empty chi means zero.
struct EtaParams {
  EtaParams(double theta, double mu);
  EtaParams(double theta, double mu, Eigen::MatrixXd chi);
  bool has_chi() const { return chi.size() != 0; }
  double theta;
  double mu;
  Eigen::MatrixXd chi;
};

/// Spectrum of the transform for chi = 0: lambda_i = theta*sum(kappa) - mu*kappa_i.
/// For mu > 0 the ordering reverses; the result is re-sorted ascending and the
/// permutation is available on the returned Spectrum.
Spectrum eta_eigen(const EtaParams& p, const Spectrum& kappa);

/// U = theta*tr(W)*I - mu*W + chi. W must be symmetric; chi (when present)
/// must match its dimensions.
Eigen::MatrixXd eta_matrix(const EtaParams& p, const Eigen::MatrixXd& W);

/// dQ/dlambda_i of Q = sigma_k/sigma_l, entrywise against the given order.
/// Requires sigma_l != 0; callers wanting cone guarantees check first.
Eigen::VectorXd quotient_gradient(const QuotientOp& op, const Eigen::VectorXd& lambda);

/// d2Q/dlambda_i dlambda_j, closed form.
Eigen::MatrixXd quotient_hessian(const QuotientOp& op, const Eigen::VectorXd& lambda);

/// Value and derivatives of W -> sigma_k/sigma_l(spectrum(U(W))).
class OperatorEval {
 public:
  double value = 0.0;
  /// dF/dW in the coordinates W was given in.
  Eigen::MatrixXd f_first;
  /// Matrix derivative of the spectral quotient at U, same coordinates.
  Eigen::MatrixXd g_matrix;
  /// dQ/dlambda_i in ascending-lambda order.
  Eigen::VectorXd g_first;
  /// Spectrum of U, ascending.
  Spectrum lambda;

  /// Second derivative quadratic form d^2/dt^2 F(W + tB) at t = 0 for
  /// symmetric B, including the divided-difference off-diagonal terms
  /// (G^pp - G^qq)/(lambda_p - lambda_q), with the analytic limit taken when a
  /// pair of eigenvalues (nearly) coincides.
  double second_form(const Eigen::MatrixXd& B) const;

 private:
  friend OperatorEval evaluate(const QuotientOp&, const EtaParams&, const Eigen::MatrixXd&,
                               double);
  explicit OperatorEval(Spectrum lam) : lambda(std::move(lam)) {}
  Eigen::MatrixXd rotation_;  // eigenvectors of U, columns ascending
  Eigen::MatrixXd hess_;      // d2Q/dlambda2 at lambda
  double theta_ = 0.0;
  double mu_ = 0.0;
};

/// Full evaluation at symmetric W. Throws admissibility_error when the
/// spectrum of U is not strictly inside Gamma_k (margin eps_cone).
OperatorEval evaluate(const QuotientOp& op, const EtaParams& p, const Eigen::MatrixXd& W,
                      double eps_cone = 0.0);

struct KeyLemmaRatio {
  /// min_i F^ii / sum_j F^jj and the second-smallest such ratio.
  double min_ratio = 0.0;
  double second_min_ratio = 0.0;
  /// Diagonal derivatives paired with kappa sorted descending.
  Eigen::VectorXd f_diag;
  Eigen::VectorXd kappa_desc;
};

/// Ratios of the smallest diagonal derivative against the trace, the quantity
/// whose positive lower bound holds for k < n (and fails as k -> n for the
/// smallest entry, while surviving for every other index).
KeyLemmaRatio key_lemma_ratio(const QuotientOp& op, const EtaParams& p, const Spectrum& kappa);

/// Same ratios when the transform-side spectrum is given directly.
KeyLemmaRatio key_lemma_ratio_lambda(const QuotientOp& op, const EtaParams& p,
                                     const Spectrum& lambda);

/// (1 - 1/(k-l)) * (sum_i Q_i xi_i)^2 / Q - xi^T (D2Q) xi, nonnegative on the
/// cone; the quantitative form of quotient concavity.
double concavity_gap(const QuotientOp& op, const Eigen::VectorXd& lambda,
                     const Eigen::VectorXd& xi);

struct TraceResiduals {
  /// |<dF/dW, W> - <dQ/dU, theta*tr(W)*I - mu*W>|
  double pairing = 0.0;
  /// The same contraction identity applied to a direction B.
  double direction = 0.0;
};

/// Consistency of the two derivative pictures under the linear transform.
TraceResiduals trace_identities(const QuotientOp& op, const EtaParams& p,
                                const Eigen::MatrixXd& W, const Eigen::MatrixXd& B);

}  // namespace etaq
