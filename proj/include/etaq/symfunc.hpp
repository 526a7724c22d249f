#pragma once

#include <Eigen/Dense>

#include <etaq/spectrum.hpp>

namespace etaq {

/// All elementary symmetric polynomials sigma_0..sigma_m of z in one pass.
/// In-place reverse recurrence, O(n*m); exact for m > n would be zero-padded,
/// so m is clamped to [0, n].
Eigen::VectorXd elementary_symmetric(const Eigen::VectorXd& z, int m);

/// sigma_k(z). Throws index_error unless 0 <= k <= n. sigma_0 == 1.
double sigma(int k, const Eigen::VectorXd& z);
inline double sigma(int k, const Spectrum& s) { return sigma(k, s.values()); }

/// sigma_k of z with entry `drop` removed, written sigma_k(z|i).
/// Out-of-range orders follow the restricted-polynomial convention and give 0
/// (so sigma_{-1} = 0 and sigma_k(z|i) = 0 for k > n-1 hold in identities).
double sigma_excl(int k, const Eigen::VectorXd& z, int drop);

/// sigma_k of z with two distinct entries removed, sigma_k(z|ij).
double sigma_excl(int k, const Eigen::VectorXd& z, int drop_a, int drop_b);

/// Table S with S(i, j) = sigma_j(z|i) for j = 0..m, one row per excluded i.
Eigen::MatrixXd sigma_excl_table(const Eigen::VectorXd& z, int m);

struct ConeReport {
  bool contained = false;
  /// sigmas(j-1) = sigma_j(lambda), j = 1..k.
  Eigen::VectorXd sigmas;
  /// Smallest j with sigma_j <= eps_cone; 0 if contained.
  int first_failure = 0;
};

/// Garding cone membership: sigma_j(lambda) > eps_cone for all 1 <= j <= k.
/// The default threshold is exactly zero; solvers pass a small positive
/// eps_cone to absorb roundoff.
ConeReport cone_contains(int k, const Eigen::VectorXd& lambda, double eps_cone = 0.0);

/// sigma_k/sigma_l on the open cone; throws admissibility_error (carrying the
/// first failing level and its value) when lambda is not strictly inside.
double quotient(const QuotientOp& op, const Eigen::VectorXd& lambda, double eps_cone = 0.0);

struct MaclaurinMargins {
  /// [normalized (r,s) quotient]^(1/(r-s)) - [normalized (k,l) quotient]^(1/(k-l)),
  /// where normalized means each sigma_m is divided by C(n,m). Nonnegative on
  /// the cone when k >= r and l >= s.
  double normalized = 0.0;
  /// l(n-k+1) sigma_{k-1} sigma_l - k(n-l+1) sigma_k sigma_{l-1}; the sharper
  /// one-step comparison. Zero by convention when l == 0.
  double special = 0.0;
};

/// Margins of the two quotient comparisons for (k,l) against (r,s).
/// Requires kl.n == rs.n, k >= r, l >= s, (k,l) != (r,s), lambda in Gamma_k.
MaclaurinMargins check_maclaurin(const QuotientOp& kl, const QuotientOp& rs,
                                 const Eigen::VectorXd& lambda);

struct ReverseReport {
  /// sigma_{k-1}(lambda | pivot) / sigma_{k-1}(lambda).
  double ratio = 0.0;
  /// lambda_{n-k+1} in ascending 1-based order: the smallest entry that is
  /// positive throughout Gamma_k.
  double pivot = 0.0;
};

/// The restricted-polynomial ratio controlling how much of sigma_{k-1} survives
/// deleting the pivot entry. Requires pivot > 0 and sigma_{k-1}(lambda) > 0.
ReverseReport check_reverse(int k, const Spectrum& lambda);

}  // namespace etaq
