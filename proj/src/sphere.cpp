#include "eqfvio/sphere.hpp"

#include <cmath>

namespace eqfvio {

Eigen::Vector3d sphere_project(const Eigen::Vector3d& q, double min_norm) {
    const double n = q.norm();
    if (!(n > min_norm)) {
        throw std::domain_error("sphere_project: point is within the exception radius of the origin");
    }
    return q / n;
}

Eigen::Matrix3d sphere_project_jacobian(const Eigen::Vector3d& q) {
    const double n = q.norm();
    const Eigen::Vector3d y = q / n;
    return (Eigen::Matrix3d::Identity() - y * y.transpose()) / n;
}

Eigen::Matrix3d stereo_reflection(const Eigen::Vector3d& eta) {
    const Eigen::Vector3d e = eta.normalized();
    Eigen::Vector3d d = Eigen::Vector3d::UnitX() - e;
    if (e.x() > 0.0) {
        // 1 - e_x without cancellation near e1
        d.x() = (e.y() * e.y() + e.z() * e.z()) / (1.0 + e.x());
    }
    const double n = d.norm();
    if (n < 1e-300) {
        return Eigen::Matrix3d::Identity();
    }
    const Eigen::Vector3d zeta = d / n;
    return Eigen::Matrix3d::Identity() - 2.0 * zeta * zeta.transpose();
}

namespace {

void check_domain(const Eigen::Vector3d& eta, const Eigen::Vector3d& y) {
    // |y + eta| approximates the angle to the excluded antipode.
    if ((y + eta).norm() < kChartAntipodeTolerance) {
        throw ChartDomainError("stereo_chart: point is antipodal to the chart centre");
    }
}

}  // namespace

Eigen::Vector2d stereo_chart(const Eigen::Vector3d& eta, const Eigen::Vector3d& y) {
    check_domain(eta, y);
    const Eigen::Vector3d r = stereo_reflection(eta) * y;
    return Eigen::Vector2d(r.y(), r.z()) / (1.0 + r.x());
}

Eigen::Vector3d stereo_chart_inv(const Eigen::Vector3d& eta, const Eigen::Vector2d& z) {
    const double s = z.squaredNorm();
    const Eigen::Vector3d r = Eigen::Vector3d(1.0 - s, 2.0 * z.x(), 2.0 * z.y()) / (1.0 + s);
    return stereo_reflection(eta) * r;
}

Eigen::Matrix<double, 2, 3> stereo_chart_jacobian(const Eigen::Vector3d& eta, const Eigen::Vector3d& y) {
    check_domain(eta, y);
    const Eigen::Matrix3d H = stereo_reflection(eta);
    const Eigen::Vector3d r = H * y;
    const double d = 1.0 + r.x();
    Eigen::Matrix<double, 2, 3> J;
    J << -r.y() / (d * d), 1.0 / d, 0.0,
         -r.z() / (d * d), 0.0, 1.0 / d;
    return J * H;
}

Eigen::Matrix<double, 3, 2> stereo_chart_inv_jacobian(const Eigen::Vector3d& eta, const Eigen::Vector2d& z) {
    const double s = z.squaredNorm();
    const double d = 1.0 + s;
    // r = (1 - s, 2 z1, 2 z2) / (1 + s)
    Eigen::Matrix<double, 3, 2> J;
    J.row(0) = -4.0 * z.transpose() / (d * d);
    J(1, 0) = 2.0 / d - 4.0 * z.x() * z.x() / (d * d);
    J(1, 1) = -4.0 * z.x() * z.y() / (d * d);
    J(2, 0) = -4.0 * z.x() * z.y() / (d * d);
    J(2, 1) = 2.0 / d - 4.0 * z.y() * z.y() / (d * d);
    return stereo_reflection(eta) * J;
}

}  // namespace eqfvio
