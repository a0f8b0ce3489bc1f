#pragma once

#include <functional>

#include <Eigen/Core>

namespace eqfvio {

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central-difference Jacobian of f at x0. With `richardson`, steps h and h/2 are combined
/// to cancel the O(h^2) term. Exceptions thrown by f (chart domain errors) propagate.
Eigen::MatrixXd numeric_differential(const VectorMap& f, const Eigen::VectorXd& x0, double step = 1e-5,
                                     bool richardson = false);

/// Scalar-parameter version: d/dh f(h) at h = 0.
Eigen::VectorXd numeric_derivative(const std::function<Eigen::VectorXd(double)>& f, double step = 1e-5,
                                   bool richardson = false);

}  // namespace eqfvio
