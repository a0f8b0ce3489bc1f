#include "eqfvio/dynamics.hpp"

#include <string>

namespace eqfvio {

TotalTangent dynamics(const TotalState& xi, const ImuInput& u, double gravity) {
    TotalTangent f;
    f.pose = {u.omega, xi.velocity};
    f.v_dot = -u.omega.cross(xi.velocity) + u.accel - gravity * (xi.pose.rotation().inverse() * Eigen::Vector3d::UnitZ());
    f.p_dot.reserve(xi.landmarks.size());
    for (const auto& lm : xi.landmarks) {
        f.p_dot.push_back({lm.id, Eigen::Vector3d::Zero()});
    }
    return f;
}

ImuInput apply_bias_correction(const ImuInput& u_measured, const BiasState& b_hat) {
    return {u_measured.omega - b_hat.b_omega, u_measured.accel - b_hat.b_accel, u_measured.t};
}

AlgebraElement lift(const TotalState& xi, const ImuInput& u, const CameraExtrinsics& cam, double gravity,
                    double min_depth) {
    AlgebraElement L;
    L.u = {u.omega, xi.velocity};
    L.w_dot = -u.accel + gravity * (xi.pose.rotation().inverse() * Eigen::Vector3d::UnitZ());

    const Se3Tangentd uc = adjoint_inverse(cam.body_from_camera, L.u);
    const Pose3d camera_inv = (xi.pose * cam.body_from_camera).inverse();
    L.landmarks.reserve(xi.landmarks.size());
    for (const auto& lm : xi.landmarks) {
        const Eigen::Vector3d q = camera_inv * lm.p;
        const double q2 = q.squaredNorm();
        if (!(q2 > min_depth * min_depth)) {
            throw ExceptionSetError(lm.id, "lift: landmark " + std::to_string(lm.id) + " is in the exception set");
        }
        L.landmarks.push_back({lm.id, uc.angular + q.cross(uc.linear) / q2, q.dot(uc.linear) / q2});
    }
    return L;
}

TotalState flow_constant_input(const TotalState& xi, const ImuInput& u, double dt, double gravity) {
    const Eigen::Vector3d phi = dt * u.omega;
    const Rot3d& R0 = xi.pose.rotation();
    const Rot3d R1 = R0 * Rot3d::exp(phi);
    const Eigen::Vector3d g = gravity * Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d V0 = R0 * xi.velocity;
    const Eigen::Vector3d V1 = V0 + R0 * (dt * (so3_left_jacobian(phi) * u.accel)) - dt * g;
    const Eigen::Vector3d x1 = xi.pose.translation() + dt * V0 +
                               R0 * (0.5 * dt * dt * (so3_double_integral(phi) * u.accel)) - 0.5 * dt * dt * g;
    TotalState out;
    out.pose = Pose3d(R1, x1);
    out.velocity = R1.inverse() * V1;
    out.landmarks = xi.landmarks;
    return out;
}

}  // namespace eqfvio
