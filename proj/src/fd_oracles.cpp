#include <etaq/fd_oracles.hpp>

namespace etaq {

namespace {

Eigen::VectorXd central_gradient(const ScalarField& fn, const Eigen::VectorXd& x, double h) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n), p(x);
  for (int i = 0; i < n; ++i) {
    p(i) = x(i) + h;
    const double f_plus = fn(p);
    p(i) = x(i) - h;
    const double f_minus = fn(p);
    p(i) = x(i);
    g(i) = (f_plus - f_minus) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd central_hessian(const ScalarField& fn, const Eigen::VectorXd& x, double h) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd p(x);
  const double f0 = fn(x);
  for (int i = 0; i < n; ++i) {
    p(i) = x(i) + h;
    const double fp = fn(p);
    p(i) = x(i) - h;
    const double fm = fn(p);
    p(i) = x(i);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double quad = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          p(i) = x(i) + si * h;
          p(j) = x(j) + sj * h;
          quad += si * sj * fn(p);
          p(i) = x(i);
          p(j) = x(j);
        }
      }
      H(i, j) = H(j, i) = quad / (4.0 * h * h);
    }
  }
  return H;
}

}  // namespace

Eigen::VectorXd fd_gradient_oracle(const ScalarField& fn, const Eigen::VectorXd& x, double step) {
  const Eigen::VectorXd coarse = central_gradient(fn, x, step);
  const Eigen::VectorXd fine = central_gradient(fn, x, step / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

Eigen::MatrixXd fd_hessian_oracle(const ScalarField& fn, const Eigen::VectorXd& x, double step) {
  const Eigen::MatrixXd coarse = central_hessian(fn, x, step);
  const Eigen::MatrixXd fine = central_hessian(fn, x, step / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

double fd_second_directional(const ScalarField& fn, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& d, double step) {
  auto second = [&](double h) {
    return (fn(x + h * d) - 2.0 * fn(x) + fn(x - h * d)) / (h * h);
  };
  return (4.0 * second(step / 2.0) - second(step)) / 3.0;
}

}  // namespace etaq
