#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>

#include "eqfvio/dynamics.hpp"
#include "eqfvio/state.hpp"

namespace eqfvio::test {

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double pose_distance(const Pose3d& a, const Pose3d& b) {
    return std::max(max_abs(a.matrix() - b.matrix()), 0.0);
}

inline double state_distance(const TotalState& a, const TotalState& b) {
    double d = std::max(pose_distance(a.pose, b.pose), max_abs(a.velocity - b.velocity));
    for (std::size_t i = 0; i < a.landmarks.size(); ++i) {
        d = std::max(d, max_abs(a.landmarks[i].p - b.landmarks[i].p));
    }
    return d;
}

inline double bearing_distance(const BearingSet& a, const BearingSet& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, max_abs(a[i].y - b[i].y));
    }
    return d;
}

// Reference integrator on (R, x, v) as plain matrices, projected back onto SO(3) once at the end.
struct Kinematics {
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
};

inline Kinematics kin_rate(const Kinematics& k, const ImuInput& u, double g) {
    Kinematics d;
    d.R = k.R * skew(u.omega);
    d.x = k.R * k.v;
    d.v = -u.omega.cross(k.v) + u.accel - g * k.R.transpose() * Eigen::Vector3d::UnitZ();
    return d;
}

inline Kinematics kin_axpy(const Kinematics& k, double h, const Kinematics& d) {
    return {k.R + h * d.R, k.x + h * d.x, k.v + h * d.v};
}

/// RK4 over [t0, t0 + T] with `steps` steps; `input(t)` gives the IMU reading.
inline TotalState rk4(const TotalState& xi, const std::function<ImuInput(double)>& input, double t0, double T,
                      int steps, double g = kDefaultGravity) {
    Kinematics k{xi.pose.rotation().matrix(), xi.pose.translation(), xi.velocity};
    const double h = T / steps;
    for (int i = 0; i < steps; ++i) {
        const double t = t0 + i * h;
        const Kinematics k1 = kin_rate(k, input(t), g);
        const Kinematics k2 = kin_rate(kin_axpy(k, h / 2, k1), input(t + h / 2), g);
        const Kinematics k3 = kin_rate(kin_axpy(k, h / 2, k2), input(t + h / 2), g);
        const Kinematics k4 = kin_rate(kin_axpy(k, h, k3), input(t + h), g);
        k.R += h / 6 * (k1.R + 2 * k2.R + 2 * k3.R + k4.R);
        k.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
        k.v += h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    }
    TotalState out = xi;
    out.pose = Pose3d(Rot3d::from_matrix(k.R), k.x);
    out.velocity = k.v;
    return out;
}

}  // namespace eqfvio::test
