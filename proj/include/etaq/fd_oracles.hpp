#pragma once

#include <Eigen/Dense>
#include <functional>

namespace etaq {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Central-difference gradient with one Richardson extrapolation step
/// ((4 D(h/2) - D(h)) / 3), leaving O(h^4) truncation error.
Eigen::VectorXd fd_gradient_oracle(const ScalarField& fn, const Eigen::VectorXd& x,
                                   double step = 1e-5);

/// Central-difference Hessian (3-point diagonal, 4-point cross terms) with one
/// Richardson extrapolation step. Symmetric by construction.
Eigen::MatrixXd fd_hessian_oracle(const ScalarField& fn, const Eigen::VectorXd& x,
                                  double step = 1e-4);

/// Scalar second difference along a fixed direction, Richardson-extrapolated:
/// d^2/dt^2 fn(x + t d) at t = 0.
double fd_second_directional(const ScalarField& fn, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& d, double step = 1e-4);

}  // namespace etaq
