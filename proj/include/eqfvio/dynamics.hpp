#pragma once

#include <Eigen/Core>

#include "eqfvio/state.hpp"

namespace eqfvio {

inline constexpr double kDefaultGravity = 9.81;

/// Body-frame angular velocity (rad/s) and specific force (m/s^2) at `t` seconds.
struct ImuInput {
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();
    Eigen::Vector3d accel = Eigen::Vector3d::Zero();
    double t = 0.0;
};

struct BiasState {
    Eigen::Vector3d b_omega = Eigen::Vector3d::Zero();
    Eigen::Vector3d b_accel = Eigen::Vector3d::Zero();

    Eigen::Matrix<double, 6, 1> vector() const {
        Eigen::Matrix<double, 6, 1> v;
        v << b_omega, b_accel;
        return v;
    }
    static BiasState from_vector(const Eigen::Matrix<double, 6, 1>& v) { return {v.head<3>(), v.tail<3>()}; }
};

/// P' = P U(Omega, v), v' = -Omega x v + a - g R_P^T e3, p_i' = 0.
TotalTangent dynamics(const TotalState& xi, const ImuInput& u, double gravity = kDefaultGravity);

/// (Omega_m - b_Omega, a_m - b_a).
ImuInput apply_bias_correction(const ImuInput& u_measured, const BiasState& b_hat);

/// Lift of the dynamics into the symmetry algebra:
///   ( U(Omega, v), -a + g R_P^T e3, (Omega_C + q_i x v_C / |q_i|^2, q_i^T v_C / |q_i|^2) )
/// with q_i = (P T_C)^{-1}(p_i) and (Omega_C, v_C) = Ad_{T_C}^{-1}(Omega, v).
/// Throws ExceptionSetError naming the first landmark with |q_i| <= min_depth.
AlgebraElement lift(const TotalState& xi, const ImuInput& u, const CameraExtrinsics& cam,
                    double gravity = kDefaultGravity, double min_depth = kDefaultMinDepth);

/// Exact flow of the dynamics for time `dt` with the input held constant.
TotalState flow_constant_input(const TotalState& xi, const ImuInput& u, double dt, double gravity = kDefaultGravity);

}  // namespace eqfvio
