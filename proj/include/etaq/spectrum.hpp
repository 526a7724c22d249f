#pragma once

#include <Eigen/Dense>
#include <vector>

#include <etaq/errors.hpp>

namespace etaq {

/// An eigenvalue list kept sorted ascending, with the sort permutation
/// retained so callers can map results back to the order they supplied.
/// Ties keep their original relative order (stable sort).
class Spectrum {
 public:
  explicit Spectrum(const Eigen::VectorXd& raw);

  int size() const { return static_cast<int>(sorted_.size()); }
  /// Ascending values.
  const Eigen::VectorXd& values() const { return sorted_; }
  /// Values in the order they were supplied.
  const Eigen::VectorXd& raw() const { return raw_; }
  /// values()(i) == raw()(order()[i]).
  const std::vector<int>& order() const { return order_; }
  double operator()(int i) const { return sorted_(i); }

 private:
  Eigen::VectorXd raw_;
  Eigen::VectorXd sorted_;
  std::vector<int> order_;
};

/// Index pattern (n, k, l) of a sigma_k/sigma_l quotient, 0 <= l < k <= n.
struct QuotientOp {
  QuotientOp(int n, int k, int l);
  int n;
  int k;
  int l;
};

}  // namespace etaq
