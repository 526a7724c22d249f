#pragma once

// Test-only reference implementations, kept deliberately naive and independent
// of the library code paths they check.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include <etaq/expression.hpp>

namespace oracle {

/// Sum of products over all k-subsets, by bitmask enumeration. O(2^n); n <= 20.
inline double sigma_enum(int k, const Eigen::VectorXd& z) {
  const int n = static_cast<int>(z.size());
  if (k == 0) return 1.0;
  if (k < 0 || k > n) return 0.0;
  double acc = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) prod *= z(i);
    acc += prod;
  }
  return acc;
}

/// sigma_enum on the vector with one or two entries removed.
inline double sigma_enum_excl(int k, const Eigen::VectorXd& z, int a, int b = -1) {
  std::vector<double> kept;
  for (int i = 0; i < z.size(); ++i)
    if (i != a && i != b) kept.push_back(z(i));
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(kept.data(), static_cast<long>(kept.size()));
  return sigma_enum(k, v);
}

/// Deterministic vector with entries uniform in [lo, hi].
inline Eigen::VectorXd random_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

/// Random expression tree for printer round-trip checks. Leaves are
/// nonnegative numbers (negation enters only through the unary node, as
/// in parsed trees) and variables from a small fixed pool.
inline etaq::expr::NodePtr random_expr_node(std::mt19937_64& rng, int depth) {
  using namespace etaq::expr;
  static const char* vars[] = {"x1", "x2", "x3", "u", "p1", "p2", "r"};
  static const char* funcs[] = {"sin", "cos", "sinh", "cosh",
                                "exp", "log", "sqrt", "abs"};
  static const char ops[] = {'+', '-', '*', '/', '^'};
  std::uniform_int_distribution<int> kind(0, depth <= 1 ? 1 : 4);
  switch (kind(rng)) {
    case 0: {
      std::uniform_int_distribution<int> style(0, 1);
      if (style(rng) == 0) {
        return make_number(std::uniform_int_distribution<int>(0, 9)(rng));
      }
      return make_number(std::uniform_real_distribution<double>(0.0, 10.0)(rng));
    }
    case 1:
      return make_variable(vars[std::uniform_int_distribution<int>(0, 6)(rng)]);
    case 2:
      return make_unary(random_expr_node(rng, depth - 1));
    case 3:
      return make_call(funcs[std::uniform_int_distribution<int>(0, 7)(rng)],
                       random_expr_node(rng, depth - 1));
    default:
      return make_binary(ops[std::uniform_int_distribution<int>(0, 4)(rng)],
                         random_expr_node(rng, depth - 1),
                         random_expr_node(rng, depth - 1));
  }
}

inline etaq::expr::Expression random_expression(std::mt19937_64& rng, int max_depth) {
  return etaq::expr::Expression(random_expr_node(rng, max_depth), "");
}

}  // namespace oracle
