#include <etaq/eta_operator.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <etaq/errors.hpp>

namespace etaq {

namespace {

void require_symmetric(const Eigen::MatrixXd& M, const char* who) {
  if (M.rows() != M.cols()) throw index_error(std::string(who) + ": matrix not square");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw index_error(std::string(who) + ": matrix not symmetric");
}

void require_cone(const QuotientOp& op, const Eigen::VectorXd& lambda, double eps_cone) {
  const ConeReport cone = cone_contains(op.k, lambda, eps_cone);
  if (!cone.contained)
    throw admissibility_error("transform spectrum outside Gamma_" + std::to_string(op.k) +
                                  ": sigma_" + std::to_string(cone.first_failure) + " = " +
                                  std::to_string(cone.sigmas(cone.first_failure - 1)),
                              cone.first_failure, cone.sigmas(cone.first_failure - 1));
}

KeyLemmaRatio ratios_from_f(Eigen::VectorXd f_diag, Eigen::VectorXd kappa_desc) {
  KeyLemmaRatio out;
  out.f_diag = std::move(f_diag);
  out.kappa_desc = std::move(kappa_desc);
  const double total = out.f_diag.sum();
  Eigen::VectorXd sorted = out.f_diag;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  out.min_ratio = sorted(0) / total;
  out.second_min_ratio = sorted(1) / total;
  return out;
}

}  // namespace

EtaParams::EtaParams(double theta_, double mu_) : theta(theta_), mu(mu_) {
  if (!(theta > 0.0)) throw index_error("eta params need theta > 0");
  if (!(theta >= mu)) throw index_error("eta params need theta >= mu");
}

EtaParams::EtaParams(double theta_, double mu_, Eigen::MatrixXd chi_) : EtaParams(theta_, mu_) {
  require_symmetric(chi_, "eta params chi");
  chi = std::move(chi_);
}

Spectrum eta_eigen(const EtaParams& p, const Spectrum& kappa) {
  if (p.has_chi()) throw index_error("eta_eigen is spectral only for chi = 0");
  const double trace = kappa.raw().sum();
  const Eigen::VectorXd lam =
      Eigen::VectorXd::Constant(kappa.size(), p.theta * trace) - p.mu * kappa.raw();
  return Spectrum(lam);
}

Eigen::MatrixXd eta_matrix(const EtaParams& p, const Eigen::MatrixXd& W) {
  require_symmetric(W, "eta_matrix");
  const long n = W.rows();
  Eigen::MatrixXd U = p.theta * W.trace() * Eigen::MatrixXd::Identity(n, n) - p.mu * W;
  if (p.has_chi()) {
    if (p.chi.rows() != n) throw index_error("eta_matrix: chi dimension mismatch");
    U += p.chi;
  }
  return U;
}

Eigen::VectorXd quotient_gradient(const QuotientOp& op, const Eigen::VectorXd& lambda) {
  if (lambda.size() != op.n) throw index_error("quotient_gradient: spectrum length != op.n");
  const Eigen::VectorXd esf = elementary_symmetric(lambda, op.k);
  const double sk = esf(op.k);
  const double sl = op.l == 0 ? 1.0 : esf(op.l);
  const Eigen::MatrixXd table = sigma_excl_table(lambda, op.k - 1);
  Eigen::VectorXd g(op.n);
  for (int i = 0; i < op.n; ++i) {
    const double a = table(i, op.k - 1);
    const double b = op.l == 0 ? 0.0 : table(i, op.l - 1);
    g(i) = (a * sl - sk * b) / (sl * sl);
  }
  return g;
}

Eigen::MatrixXd quotient_hessian(const QuotientOp& op, const Eigen::VectorXd& lambda) {
  if (lambda.size() != op.n) throw index_error("quotient_hessian: spectrum length != op.n");
  const int n = op.n;
  const Eigen::VectorXd esf = elementary_symmetric(lambda, op.k);
  const double sk = esf(op.k);
  const double sl = op.l == 0 ? 1.0 : esf(op.l);
  const Eigen::MatrixXd table = sigma_excl_table(lambda, op.k - 1);
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i) {
    const double ai = table(i, op.k - 1);
    const double bi = op.l == 0 ? 0.0 : table(i, op.l - 1);
    H(i, i) = -2.0 * ai * bi / (sl * sl) + 2.0 * sk * bi * bi / (sl * sl * sl);
    for (int j = i + 1; j < n; ++j) {
      const double aj = table(j, op.k - 1);
      const double bj = op.l == 0 ? 0.0 : table(j, op.l - 1);
      const double akk = sigma_excl(op.k - 2, lambda, i, j);
      const double all = sigma_excl(op.l - 2, lambda, i, j);
      H(i, j) = H(j, i) = akk / sl - (ai * bj + aj * bi) / (sl * sl) - sk * all / (sl * sl) +
                          2.0 * sk * bi * bj / (sl * sl * sl);
    }
  }
  return H;
}

OperatorEval evaluate(const QuotientOp& op, const EtaParams& p, const Eigen::MatrixXd& W,
                      double eps_cone) {
  require_symmetric(W, "evaluate");
  if (W.rows() != op.n) throw index_error("evaluate: matrix dimension != op.n");
  const Eigen::MatrixXd U = eta_matrix(p, W);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(U);
  if (es.info() != Eigen::Success) throw error("evaluate: eigendecomposition failed");

  OperatorEval out{Spectrum(es.eigenvalues())};
  require_cone(op, out.lambda.values(), eps_cone);
  out.rotation_ = es.eigenvectors();
  out.theta_ = p.theta;
  out.mu_ = p.mu;
  out.value = quotient(op, out.lambda.values(), eps_cone);
  out.g_first = quotient_gradient(op, out.lambda.values());
  out.hess_ = quotient_hessian(op, out.lambda.values());
  out.g_matrix = out.rotation_ * out.g_first.asDiagonal() * out.rotation_.transpose();
  out.f_first = p.theta * out.g_first.sum() *
                    Eigen::MatrixXd::Identity(op.n, op.n) -
                p.mu * out.g_matrix;
  return out;
}

double OperatorEval::second_form(const Eigen::MatrixXd& B) const {
  require_symmetric(B, "second_form");
  const long n = B.rows();
  if (n != rotation_.rows()) throw index_error("second_form: direction dimension mismatch");
  const Eigen::MatrixXd Bt =
      theta_ * B.trace() * Eigen::MatrixXd::Identity(n, n) - mu_ * B;
  const Eigen::MatrixXd Bh = rotation_.transpose() * Bt * rotation_;
  const Eigen::VectorXd& lam = lambda.values();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());

  double acc = 0.0;
  for (long pp = 0; pp < n; ++pp)
    for (long q = 0; q < n; ++q) acc += hess_(pp, q) * Bh(pp, pp) * Bh(q, q);
  for (long pp = 0; pp < n; ++pp) {
    for (long q = pp + 1; q < n; ++q) {
      const double gap = lam(q) - lam(pp);
      // Divided difference of the gradient; analytic limit at coincidence.
      const double coeff = std::abs(gap) <= 1e-8 * scale
                               ? 0.5 * (hess_(pp, pp) + hess_(q, q)) - hess_(pp, q)
                               : (g_first(pp) - g_first(q)) / -gap;
      acc += 2.0 * coeff * Bh(pp, q) * Bh(pp, q);
    }
  }
  return acc;
}

KeyLemmaRatio key_lemma_ratio(const QuotientOp& op, const EtaParams& p, const Spectrum& kappa) {
  if (p.has_chi()) throw index_error("key_lemma_ratio is spectral only for chi = 0");
  if (kappa.size() != op.n) throw index_error("key_lemma_ratio: spectrum length != op.n");
  const double trace = kappa.values().sum();
  // Work against kappa descending so f_diag reports smallest-first entries.
  const Eigen::VectorXd kd = kappa.values().reverse();
  const Eigen::VectorXd lam = Eigen::VectorXd::Constant(op.n, p.theta * trace) - p.mu * kd;
  require_cone(op, lam, 0.0);
  const Eigen::VectorXd g = quotient_gradient(op, lam);
  const Eigen::VectorXd f = Eigen::VectorXd::Constant(op.n, p.theta * g.sum()) - p.mu * g;
  return ratios_from_f(f, kd);
}

KeyLemmaRatio key_lemma_ratio_lambda(const QuotientOp& op, const EtaParams& p,
                                     const Spectrum& lambda) {
  if (p.has_chi()) throw index_error("key_lemma_ratio is spectral only for chi = 0");
  if (lambda.size() != op.n) throw index_error("key_lemma_ratio: spectrum length != op.n");
  require_cone(op, lambda.values(), 0.0);
  const Eigen::VectorXd g = quotient_gradient(op, lambda.values());
  const Eigen::VectorXd f = Eigen::VectorXd::Constant(op.n, p.theta * g.sum()) - p.mu * g;
  Eigen::VectorXd kappa_desc;
  if (p.mu != 0.0) {
    const double trace = lambda.values().sum() / (op.n * p.theta - p.mu);
    kappa_desc =
        (Eigen::VectorXd::Constant(op.n, p.theta * trace) - lambda.values()) / p.mu;
  }
  return ratios_from_f(f, kappa_desc);
}

double concavity_gap(const QuotientOp& op, const Eigen::VectorXd& lambda,
                     const Eigen::VectorXd& xi) {
  if (xi.size() != lambda.size()) throw index_error("concavity_gap: xi length mismatch");
  const double q = quotient(op, lambda);  // throws when outside the cone
  const Eigen::VectorXd g = quotient_gradient(op, lambda);
  const Eigen::MatrixXd h = quotient_hessian(op, lambda);
  const double d = op.k - op.l;
  const double directional = g.dot(xi);
  return (1.0 - 1.0 / d) * directional * directional / q - xi.dot(h * xi);
}

TraceResiduals trace_identities(const QuotientOp& op, const EtaParams& p,
                                const Eigen::MatrixXd& W, const Eigen::MatrixXd& B) {
  require_symmetric(B, "trace_identities");
  const OperatorEval eval = evaluate(op, p, W);
  const long n = W.rows();
  auto transformed = [&](const Eigen::MatrixXd& M) {
    return (p.theta * M.trace() * Eigen::MatrixXd::Identity(n, n) - p.mu * M).eval();
  };
  TraceResiduals out;
  out.pairing = std::abs((eval.f_first.array() * W.array()).sum() -
                         (eval.g_matrix.array() * transformed(W).array()).sum());
  out.direction = std::abs((eval.f_first.array() * B.array()).sum() -
                           (eval.g_matrix.array() * transformed(B).array()).sum());
  return out;
}

}  // namespace etaq
