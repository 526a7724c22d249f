#include <etaq/symfunc.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace etaq {

namespace {

void require_order(int k, int n) {
  if (k < 0 || k > n)
    throw index_error("sigma order " + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
}

Eigen::VectorXd drop_entries(const Eigen::VectorXd& z, int a, int b) {
  const int n = static_cast<int>(z.size());
  Eigen::VectorXd kept(n - (b >= 0 ? 2 : 1));
  int w = 0;
  for (int i = 0; i < n; ++i)
    if (i != a && i != b) kept(w++) = z(i);
  return kept;
}

double binom(int n, int m) {
  double acc = 1.0;
  for (int i = 1; i <= m; ++i) acc *= static_cast<double>(n - m + i) / i;
  return acc;
}

}  // namespace

Eigen::VectorXd elementary_symmetric(const Eigen::VectorXd& z, int m) {
  const int n = static_cast<int>(z.size());
  m = std::clamp(m, 0, n);
  Eigen::VectorXd esf = Eigen::VectorXd::Zero(m + 1);
  esf(0) = 1.0;
  for (int i = 0; i < n; ++i) {
    const int top = std::min(m, i + 1);
    for (int j = top; j >= 1; --j) esf(j) += z(i) * esf(j - 1);
  }
  return esf;
}

double sigma(int k, const Eigen::VectorXd& z) {
  require_order(k, static_cast<int>(z.size()));
  if (k == 0) return 1.0;
  return elementary_symmetric(z, k)(k);
}

double sigma_excl(int k, const Eigen::VectorXd& z, int drop) {
  const int n = static_cast<int>(z.size());
  if (drop < 0 || drop >= n) throw index_error("sigma_excl index out of range");
  if (k < 0 || k > n - 1) return 0.0;  // restricted-polynomial convention
  return sigma(k, drop_entries(z, drop, -1));
}

double sigma_excl(int k, const Eigen::VectorXd& z, int drop_a, int drop_b) {
  const int n = static_cast<int>(z.size());
  if (drop_a < 0 || drop_a >= n || drop_b < 0 || drop_b >= n || drop_a == drop_b)
    throw index_error("sigma_excl needs two distinct in-range indices");
  if (k < 0 || k > n - 2) return 0.0;
  return sigma(k, drop_entries(z, drop_a, drop_b));
}

Eigen::MatrixXd sigma_excl_table(const Eigen::VectorXd& z, int m) {
  const int n = static_cast<int>(z.size());
  m = std::clamp(m, 0, n - 1);
  Eigen::MatrixXd table(n, m + 1);
  for (int i = 0; i < n; ++i)
    table.row(i) = elementary_symmetric(drop_entries(z, i, -1), m).transpose();
  return table;
}

ConeReport cone_contains(int k, const Eigen::VectorXd& lambda, double eps_cone) {
  const int n = static_cast<int>(lambda.size());
  if (k < 1 || k > n)
    throw index_error("cone level " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  ConeReport report;
  const Eigen::VectorXd esf = elementary_symmetric(lambda, k);
  report.sigmas = esf.segment(1, k);
  report.contained = true;
  for (int j = 1; j <= k; ++j) {
    if (!(esf(j) > eps_cone)) {
      report.contained = false;
      report.first_failure = j;
      break;
    }
  }
  return report;
}

double quotient(const QuotientOp& op, const Eigen::VectorXd& lambda, double eps_cone) {
  if (lambda.size() != op.n) throw index_error("quotient: spectrum length != op.n");
  const ConeReport cone = cone_contains(op.k, lambda, eps_cone);
  if (!cone.contained)
    throw admissibility_error("spectrum outside Gamma_" + std::to_string(op.k) +
                                  ": sigma_" + std::to_string(cone.first_failure) + " = " +
                                  std::to_string(cone.sigmas(cone.first_failure - 1)),
                              cone.first_failure, cone.sigmas(cone.first_failure - 1));
  const double num = cone.sigmas(op.k - 1);
  const double den = op.l == 0 ? 1.0 : cone.sigmas(op.l - 1);
  return num / den;
}

MaclaurinMargins check_maclaurin(const QuotientOp& kl, const QuotientOp& rs,
                                 const Eigen::VectorXd& lambda) {
  if (kl.n != rs.n) throw index_error("check_maclaurin: mismatched n");
  if (kl.k < rs.k || kl.l < rs.l || (kl.k == rs.k && kl.l == rs.l))
    throw index_error("check_maclaurin needs (k,l) strictly dominating (r,s)");
  const int n = kl.n;
  const Eigen::VectorXd esf = elementary_symmetric(lambda, kl.k);
  const ConeReport cone = cone_contains(kl.k, lambda);
  if (!cone.contained)
    throw admissibility_error("check_maclaurin needs lambda in Gamma_k",
                              cone.first_failure, cone.sigmas(cone.first_failure - 1));

  auto normalized = [&](int m) { return esf(m) / binom(n, m); };
  const double lhs = normalized(kl.k) / normalized(kl.l);
  const double rhs = normalized(rs.k) / normalized(rs.l);

  MaclaurinMargins out;
  out.normalized = std::pow(rhs, 1.0 / (rs.k - rs.l)) - std::pow(lhs, 1.0 / (kl.k - kl.l));
  if (kl.l >= 1)
    out.special = kl.l * (n - kl.k + 1) * esf(kl.k - 1) * esf(kl.l) -
                  kl.k * (n - kl.l + 1) * esf(kl.k) * esf(kl.l - 1);
  return out;
}

ReverseReport check_reverse(int k, const Spectrum& lambda) {
  const int n = lambda.size();
  if (k < 1 || k > n) throw index_error("check_reverse: k outside [1, n]");
  ReverseReport out;
  out.pivot = lambda(n - k);  // ascending position n-k+1, 1-based
  if (!(out.pivot > 0.0))
    throw admissibility_error("check_reverse needs lambda_{n-k+1} > 0", k, out.pivot);
  const double full = sigma(k - 1, lambda.values());
  if (!(full > 0.0))
    throw admissibility_error("check_reverse needs sigma_{k-1} > 0", k - 1, full);
  out.ratio = sigma_excl(k - 1, lambda.values(), n - k) / full;
  return out;
}

}  // namespace etaq
