#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eqfvio/lie.hpp"

namespace eqfvio {

/// Default radius of the exception ball around the camera centre, metres.
inline constexpr double kDefaultMinDepth = 1e-3;

/// A landmark (or a configuration) came within the exception-set radius of the camera centre.
class ExceptionSetError : public std::runtime_error {
public:
    ExceptionSetError(int landmark_id, const std::string& what)
        : std::runtime_error(what), landmark_id_(landmark_id) {}
    int landmark_id() const { return landmark_id_; }

private:
    int landmark_id_;
};

struct Landmark {
    int id = 0;
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
};

/// Inertial coordinates (P, v, p_1..p_n): body pose, body-frame velocity, inertial landmarks.
struct TotalState {
    Pose3d pose;
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    std::vector<Landmark> landmarks;

    std::size_t size() const { return landmarks.size(); }
    std::vector<int> ids() const;
};

/// Pose of the camera frame {C} relative to the body frame {B}.
struct CameraExtrinsics {
    Pose3d body_from_camera;

    static CameraExtrinsics identity() { return {}; }
};

struct LandmarkTransform {
    int id = 0;
    ScaledRotd Q;
};

/// Element (A, w, Q_1..Q_n) of SE_2(3) x SOT(3)^n.
struct SymElement {
    ExtPosed ext;
    std::vector<LandmarkTransform> landmarks;

    static SymElement identity(const std::vector<int>& ids);

    SymElement operator*(const SymElement& other) const;
    SymElement inverse() const;

    const Pose3d& A() const { return ext.pose(); }
    const Eigen::Vector3d& w() const { return ext.aux(); }
    /// Transform attached to `id`; throws std::out_of_range if absent.
    const ScaledRotd& Q(int id) const;
    std::vector<int> ids() const;
};

struct LandmarkRate {
    int id = 0;
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();
    double alpha = 0.0;
};

/// Element of the Lie algebra of SymElement: (U, w_dot, (omega_i, alpha_i)).
struct AlgebraElement {
    Se3Tangentd u;
    Eigen::Vector3d w_dot = Eigen::Vector3d::Zero();
    std::vector<LandmarkRate> landmarks;

    /// Stacked as [U (6) | w_dot (3) | (omega_i, alpha_i) (4 each)].
    Eigen::VectorXd vector() const;
    static AlgebraElement from_vector(const Eigen::VectorXd& v, const std::vector<int>& ids);

    AlgebraElement operator*(double s) const;
};

SymElement exp(const AlgebraElement& xi);

/// Tangent vector to the total space: body-frame pose twist, velocity rate,
/// inertial landmark velocities.
struct TotalTangent {
    Se3Tangentd pose;
    Eigen::Vector3d v_dot = Eigen::Vector3d::Zero();
    std::vector<Landmark> p_dot;

    /// Stacked as [Omega, v (6) | v_dot (3) | p_dot_i (3 each)].
    Eigen::VectorXd vector() const;
    static TotalTangent from_vector(const Eigen::VectorXd& v, const std::vector<int>& ids);
};

struct Bearing {
    int id = 0;
    Eigen::Vector3d y = Eigen::Vector3d::UnitZ();
    bool valid = true;
};

/// Bearings y_i on S^2 in the camera frame, keyed by landmark id.
using BearingSet = std::vector<Bearing>;

/// Returns the position of `id` in `ids`, or -1.
int index_of(const std::vector<int>& ids, int id);

/// Camera-frame landmark coordinates q_i = (P T_C)^{-1}(p_i).
Eigen::Vector3d camera_point(const TotalState& xi, const Landmark& lm, const CameraExtrinsics& cam);

/// True when every landmark lies outside the exception ball.
bool outside_exception_set(const TotalState& xi, const CameraExtrinsics& cam, double min_depth = kDefaultMinDepth);

/// alpha(S, (P, v, p_i)) = (S^{-1} P, v, S^{-1}(p_i)).
TotalState gauge_act(const GaugeElementd& S, const TotalState& xi);

/// Phi((A, w, Q_i), (P, v, p_i)) = (P A, R_A^T (v - w), P A T_C Q_i^{-1} T_C^{-1} P^{-1}(p_i)).
TotalState sym_act_total(const SymElement& X, const TotalState& xi, const CameraExtrinsics& cam,
                         double min_depth = kDefaultMinDepth);

/// rho((A, w, Q_i), (eta_i)) = (R_{Q_i}^T eta_i).
BearingSet output_act(const SymElement& X, const BearingSet& y);

/// h^k = pi_S2((P T_C)^{-1}(p_k)); landmarks inside the exception ball come back invalid.
BearingSet measure(const TotalState& xi, const CameraExtrinsics& cam, double min_depth = kDefaultMinDepth);

/// A group element X with Phi(X, from) = to. Both states must carry the same landmark ids.
SymElement solve_transitive(const TotalState& from, const TotalState& to, const CameraExtrinsics& cam);

}  // namespace eqfvio
