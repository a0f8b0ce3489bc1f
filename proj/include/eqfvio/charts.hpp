#pragma once

#include <vector>

#include <Eigen/Core>

#include "eqfvio/state.hpp"

namespace eqfvio {

/// Dimension of the state chart for n landmarks: gravity (2) | velocity (3) | landmarks (3n).
inline constexpr Eigen::Index chart_dim(std::size_t n) { return 5 + 3 * static_cast<Eigen::Index>(n); }
/// Dimension of the total-space tangent: pose (6) | velocity (3) | landmarks (3n).
inline constexpr Eigen::Index total_tangent_dim(std::size_t n) { return 9 + 3 * static_cast<Eigen::Index>(n); }
/// Dimension of the symmetry algebra: U (6) | w (3) | (omega, alpha) (4n).
inline constexpr Eigen::Index algebra_dim(std::size_t n) { return 9 + 4 * static_cast<Eigen::Index>(n); }

/// Gravity direction in the body frame, R_P^T e3.
Eigen::Vector3d body_gravity_direction(const Pose3d& P);

/// State chart about `origin`:
///   [ theta_{R_P0^T e3}(R_P^T e3) ; v - v0 ; q_i - q0_i ]
/// where q_i = (P T_C)^{-1}(p_i) are camera-frame landmark coordinates. Landmark
/// rows follow the order of origin.landmarks. Every row is invariant under gauge_act.
Eigen::VectorXd chart_epsilon(const TotalState& xi, const TotalState& origin, const CameraExtrinsics& cam);

/// A representative of chart_epsilon^{-1}(eps): yaw and position are copied from the origin pose.
TotalState chart_epsilon_inv(const Eigen::VectorXd& eps, const TotalState& origin, const CameraExtrinsics& cam);

/// Output chart (theta_{y0_1}(y_1), ..., theta_{y0_n}(y_n)), ordered as `origin_y`.
/// Components that are missing, invalid, or outside the chart domain are zero and listed in `invalid_ids`.
struct OutputCoordinates {
    Eigen::VectorXd z;
    std::vector<int> invalid_ids;
};
OutputCoordinates chart_delta(const BearingSet& y, const BearingSet& origin_y);

/// D(chart_epsilon o pi) at the origin, acting on TotalTangent::vector() coordinates.
Eigen::MatrixXd origin_chart_differential(const TotalState& origin, const CameraExtrinsics& cam);

/// D_E|_id Phi_origin(E), mapping AlgebraElement::vector() to TotalTangent::vector().
Eigen::MatrixXd action_differential(const TotalState& origin, const CameraExtrinsics& cam);

/// A fixed right inverse of action_differential: pose and velocity are matched
/// exactly, each landmark rate takes the minimum-norm (omega, alpha) with omega orthogonal to q0_i.
AlgebraElement action_right_inverse(const TotalState& origin, const TotalTangent& tangent, const CameraExtrinsics& cam);

/// Basis of total-space tangents at the origin generated by infinitesimal gauge
/// transformations (yaw about e3, translation along e1, e2, e3). Columns lie in the
/// kernel of origin_chart_differential.
Eigen::MatrixXd gauge_directions(const TotalState& origin);

}  // namespace eqfvio
