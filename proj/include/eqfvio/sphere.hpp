#pragma once

#include <stdexcept>

#include <Eigen/Core>

namespace eqfvio {

/// A point fell outside the domain of a local chart.
class ChartDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Angular distance to the excluded antipode below which a chart evaluation is rejected.
inline constexpr double kChartAntipodeTolerance = 1e-8;

/// pi_S2(q) = q / |q|. Throws std::domain_error when |q| <= min_norm.
Eigen::Vector3d sphere_project(const Eigen::Vector3d& q, double min_norm = 1e-3);

/// Jacobian of pi_S2 at q: (I - y y^T) / |q|.
Eigen::Matrix3d sphere_project_jacobian(const Eigen::Vector3d& q);

/// Stereographic chart centred at eta: theta_eta(eta) = 0, domain S^2 \ {-eta}.
/// theta_eta(y) = theta_e1(H y) where H is the reflection exchanging eta and e1,
/// and theta_e1(y) = (y2, y3) / (1 + y1).
Eigen::Vector2d stereo_chart(const Eigen::Vector3d& eta, const Eigen::Vector3d& y);
Eigen::Vector3d stereo_chart_inv(const Eigen::Vector3d& eta, const Eigen::Vector2d& z);

/// D_y theta_eta(y), as a 2x3 matrix acting on ambient vectors tangent at y.
Eigen::Matrix<double, 2, 3> stereo_chart_jacobian(const Eigen::Vector3d& eta, const Eigen::Vector3d& y);
/// D_z theta_eta^{-1}(z).
Eigen::Matrix<double, 3, 2> stereo_chart_inv_jacobian(const Eigen::Vector3d& eta, const Eigen::Vector2d& z);

/// The reflection I - 2 zeta zeta^T with zeta = pi_S2(e1 - eta); identity when eta = e1.
Eigen::Matrix3d stereo_reflection(const Eigen::Vector3d& eta);

}  // namespace eqfvio
