#include "eqfvio/charts.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eqfvio/sphere.hpp"

namespace eqfvio {

namespace {

const Landmark& landmark_by_id(const TotalState& xi, std::size_t hint, int id) {
    if (hint < xi.landmarks.size() && xi.landmarks[hint].id == id) {
        return xi.landmarks[hint];
    }
    const int k = index_of(xi.ids(), id);
    if (k < 0) {
        throw std::out_of_range("chart: state has no landmark with id " + std::to_string(id));
    }
    return xi.landmarks[static_cast<std::size_t>(k)];
}

// Rotation with R^T e3 = eta and the given ZYX yaw.
Rot3d rotation_from_gravity(const Eigen::Vector3d& eta, double yaw) {
    // R = Rz(yaw) Ry(pitch) Rx(roll), R^T e3 = (-sin pitch, cos pitch sin roll, cos pitch cos roll)
    const double pitch = std::asin(std::clamp(-eta.x(), -1.0, 1.0));
    const double roll = std::atan2(eta.y(), eta.z());
    return Rot3d::yaw(yaw) * Rot3d::exp(pitch * Eigen::Vector3d::UnitY()) * Rot3d::exp(roll * Eigen::Vector3d::UnitX());
}

double zyx_yaw(const Rot3d& R) {
    const Eigen::Matrix3d m = R.matrix();
    return std::atan2(m(1, 0), m(0, 0));
}

}  // namespace

Eigen::Vector3d body_gravity_direction(const Pose3d& P) {
    return P.rotation().inverse() * Eigen::Vector3d::UnitZ();
}

Eigen::VectorXd chart_epsilon(const TotalState& xi, const TotalState& origin, const CameraExtrinsics& cam) {
    const std::size_t n = origin.landmarks.size();
    if (xi.landmarks.size() != n) {
        throw std::invalid_argument("chart_epsilon: landmark counts differ");
    }
    Eigen::VectorXd eps(chart_dim(n));
    eps.head<2>() = stereo_chart(body_gravity_direction(origin.pose), body_gravity_direction(xi.pose));
    eps.segment<3>(2) = xi.velocity - origin.velocity;
    for (std::size_t i = 0; i < n; ++i) {
        const Landmark& lm0 = origin.landmarks[i];
        const Landmark& lm = landmark_by_id(xi, i, lm0.id);
        eps.segment<3>(5 + 3 * i) = camera_point(xi, lm, cam) - camera_point(origin, lm0, cam);
    }
    return eps;
}

TotalState chart_epsilon_inv(const Eigen::VectorXd& eps, const TotalState& origin, const CameraExtrinsics& cam) {
    const std::size_t n = origin.landmarks.size();
    if (eps.size() != chart_dim(n)) {
        throw std::invalid_argument("chart_epsilon_inv: coordinate dimension mismatch");
    }
    const Eigen::Vector3d eta = stereo_chart_inv(body_gravity_direction(origin.pose), eps.head<2>());
    TotalState xi;
    xi.pose = Pose3d(rotation_from_gravity(eta, zyx_yaw(origin.pose.rotation())), origin.pose.translation());
    xi.velocity = origin.velocity + eps.segment<3>(2);
    const Pose3d camera = xi.pose * cam.body_from_camera;
    xi.landmarks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Landmark& lm0 = origin.landmarks[i];
        const Eigen::Vector3d q = camera_point(origin, lm0, cam) + eps.segment<3>(5 + 3 * i);
        xi.landmarks.push_back({lm0.id, camera * q});
    }
    return xi;
}

OutputCoordinates chart_delta(const BearingSet& y, const BearingSet& origin_y) {
    OutputCoordinates out;
    out.z = Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(origin_y.size()));
    for (std::size_t i = 0; i < origin_y.size(); ++i) {
        const Bearing& b0 = origin_y[i];
        const Bearing* b = nullptr;
        if (i < y.size() && y[i].id == b0.id) {
            b = &y[i];
        } else {
            for (const auto& c : y) {
                if (c.id == b0.id) {
                    b = &c;
                    break;
                }
            }
        }
        if (b == nullptr || !b->valid || !b0.valid) {
            out.invalid_ids.push_back(b0.id);
            continue;
        }
        try {
            out.z.segment<2>(2 * static_cast<Eigen::Index>(i)) = stereo_chart(b0.y, b->y);
        } catch (const ChartDomainError&) {
            out.invalid_ids.push_back(b0.id);
        }
    }
    return out;
}

Eigen::MatrixXd origin_chart_differential(const TotalState& origin, const CameraExtrinsics& cam) {
    const std::size_t n = origin.landmarks.size();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(chart_dim(n), total_tangent_dim(n));
    const Eigen::Vector3d eta0 = body_gravity_direction(origin.pose);
    // R_P^T e3 moves by -omega x eta0 under P0 exp(t U)
    D.block<2, 3>(0, 0) = stereo_chart_jacobian(eta0, eta0) * skew(eta0);
    D.block<3, 3>(2, 6).setIdentity();

    const Eigen::Matrix3d RcT = cam.body_from_camera.rotation().matrix().transpose();
    const Eigen::Matrix3d RpT = origin.pose.rotation().matrix().transpose();
    const Pose3d P0_inv = origin.pose.inverse();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index r = 5 + 3 * static_cast<Eigen::Index>(i);
        const Eigen::Vector3d m = P0_inv * origin.landmarks[i].p;
        D.block<3, 3>(r, 0) = RcT * skew(m);
        D.block<3, 3>(r, 3) = -RcT;
        D.block<3, 3>(r, 9 + 3 * static_cast<Eigen::Index>(i)) = RcT * RpT;
    }
    return D;
}

Eigen::MatrixXd action_differential(const TotalState& origin, const CameraExtrinsics& cam) {
    const std::size_t n = origin.landmarks.size();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(total_tangent_dim(n), algebra_dim(n));
    D.block<6, 6>(0, 0).setIdentity();
    D.block<3, 3>(6, 0) = skew(origin.velocity);
    D.block<3, 3>(6, 6) = -Eigen::Matrix3d::Identity();

    const Eigen::Matrix3d Rp = origin.pose.rotation().matrix();
    const Eigen::Matrix3d RpRc = Rp * cam.body_from_camera.rotation().matrix();
    const Pose3d P0_inv = origin.pose.inverse();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index r = 9 + 3 * static_cast<Eigen::Index>(i);
        const Eigen::Index c = 9 + 4 * static_cast<Eigen::Index>(i);
        const Eigen::Vector3d m = P0_inv * origin.landmarks[i].p;
        const Eigen::Vector3d q0 = camera_point(origin, origin.landmarks[i], cam);
        D.block<3, 3>(r, 0) = -Rp * skew(m);
        D.block<3, 3>(r, 3) = Rp;
        D.block<3, 3>(r, c) = RpRc * skew(q0);
        D.block<3, 1>(r, c + 3) = -RpRc * q0;
    }
    return D;
}

AlgebraElement action_right_inverse(const TotalState& origin, const TotalTangent& tangent, const CameraExtrinsics& cam) {
    const std::size_t n = origin.landmarks.size();
    if (tangent.p_dot.size() != n) {
        throw std::invalid_argument("action_right_inverse: landmark counts differ");
    }
    AlgebraElement delta;
    delta.u = tangent.pose;
    delta.w_dot = -tangent.v_dot - tangent.pose.angular.cross(origin.velocity);

    const Eigen::Matrix3d RcT = cam.body_from_camera.rotation().matrix().transpose();
    const Eigen::Matrix3d RpT = origin.pose.rotation().matrix().transpose();
    const Pose3d P0_inv = origin.pose.inverse();
    delta.landmarks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Landmark& lm0 = origin.landmarks[i];
        const Eigen::Vector3d m = P0_inv * lm0.p;
        const Eigen::Vector3d q0 = camera_point(origin, lm0, cam);
        const Eigen::Vector3d& p_dot = tangent.p_dot[i].p;
        // omega x q0 + alpha q0 = t
        const Eigen::Vector3d t =
            RcT * (tangent.pose.angular.cross(m) + tangent.pose.linear - RpT * p_dot);
        const double q2 = q0.squaredNorm();
        delta.landmarks.push_back({lm0.id, q0.cross(t) / q2, q0.dot(t) / q2});
    }
    return delta;
}

Eigen::MatrixXd gauge_directions(const TotalState& origin) {
    const std::size_t n = origin.landmarks.size();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(total_tangent_dim(n), 4);
    const Pose3d P0_inv = origin.pose.inverse();
    for (int j = 0; j < 4; ++j) {
        // inertial twist s of the gauge curve S(t) = exp(t s)
        Se3Tangentd s;
        if (j == 0) {
            s.angular = Eigen::Vector3d::UnitZ();
        } else {
            s.linear = Eigen::Vector3d::Unit(j - 1);
        }
        K.block<6, 1>(0, j) = -P0_inv.adjoint(s).vector();
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::Vector3d& p = origin.landmarks[i].p;
            K.block<3, 1>(9 + 3 * static_cast<Eigen::Index>(i), j) = -(s.angular.cross(p) + s.linear);
        }
    }
    return K;
}

}  // namespace eqfvio
