#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eqfvio/config.hpp"
#include "eqfvio/dynamics.hpp"
#include "eqfvio/state.hpp"

namespace eqfvio {

// Riccati state layout: [bias (6) | gravity chart (2) | velocity (3) | landmarks (3 each)].
inline constexpr Eigen::Index kBiasDim = 6;
inline constexpr Eigen::Index kGravityOffset = 6;
inline constexpr Eigen::Index kVelocityOffset = 8;
inline constexpr Eigen::Index kLandmarkOffset = 11;
inline constexpr Eigen::Index riccati_dim(std::size_t n) { return 11 + 3 * static_cast<Eigen::Index>(n); }

enum class PropagationScheme {
    Lift,   // X <- X exp(dt Lambda)
    Exact,  // closed-form constant-input flow of the estimate, pulled back to the group
};

/// Filter gains and tuning. Variances are diagonal entries; process noise is per second.
struct GainConfig {
    double sigma0_bias = 1e-2;
    double sigma0_gravity = 1e-1;
    double sigma0_velocity = 1e-1;
    double sigma0_landmark = 1.0;

    double input_gyro = 1e-6;
    double input_accel = 1e-4;
    double bearing = 1e-4;

    double process = 1e-8;
    double process_bias = 1e-6;

    double landmark_depth = 1.0;
    int depth_median_min = 5;

    double gravity = kDefaultGravity;
    double min_depth = kDefaultMinDepth;
    double max_step = 0.1;
    double gap = 0.5;
    PropagationScheme scheme = PropagationScheme::Lift;

    // Optional initial state; without it the pipeline levels the first accelerometer sample.
    std::optional<Pose3d> init_pose;
    std::optional<Eigen::Vector3d> init_velocity;
    BiasState init_bias;

    static GainConfig from_key_values(const KeyValues& kv);
    static GainConfig load(const std::string& path);
    std::string to_text() const;

    Eigen::MatrixXd initial_covariance(std::size_t n) const;
    Eigen::MatrixXd process_noise(std::size_t n) const;
    Eigen::Matrix<double, 6, 6> input_noise() const;
};

struct Measurement {
    int id = 0;
    Eigen::Vector3d bearing = Eigen::Vector3d::UnitZ();
};

/// Bearings observed in one camera frame.
struct MeasurementBatch {
    double t = 0.0;
    std::vector<Measurement> bearings;
};

struct FilterState {
    SymElement X;
    BiasState bias;
    Eigen::MatrixXd Sigma;
    TotalState origin;
    BearingSet origin_bearings;
    Eigen::MatrixXd C0;  // output matrix, 2n x (5+3n)
    std::set<int> quarantined;

    std::size_t size() const { return origin.landmarks.size(); }
    std::vector<int> ids() const { return origin.ids(); }
    /// Position of `id` in the registry, or -1.
    int slot(int id) const;
};

/// Filter with no landmarks, X = identity and Sigma = Sigma_0.
FilterState make_filter(const Pose3d& origin_pose, const Eigen::Vector3d& origin_velocity, const BiasState& bias,
                        const GainConfig& cfg);

/// (P, v, p_i) = Phi(X, origin).
TotalState estimated_state(const FilterState& fs, const CameraExtrinsics& cam);

/// A0 (5+3n square) at the current estimate, `u` already bias-corrected.
Eigen::MatrixXd compute_state_matrix(const FilterState& fs, const ImuInput& u, const CameraExtrinsics& cam,
                                     double gravity = kDefaultGravity);
/// B ((5+3n) x 6), columns [Omega | a].
Eigen::MatrixXd compute_input_matrix(const FilterState& fs, const ImuInput& u, const CameraExtrinsics& cam);
/// C0 (2n x (5+3n)), block diagonal in the landmark columns.
Eigen::MatrixXd compute_output_matrix(const TotalState& origin, const CameraExtrinsics& cam);

/// One Euler step of the Riccati equation without the measurement term.
void propagate_covariance(Eigen::MatrixXd& Sigma, const Eigen::MatrixXd& A0, const Eigen::MatrixXd& B,
                          const Eigen::Matrix<double, 6, 6>& R, const Eigen::MatrixXd& P, double dt);

/// Propagates by `dt` with the measured input. Landmarks that enter the exception set are
/// quarantined and removed; their ids are returned.
std::vector<int> propagate(FilterState& fs, const ImuInput& u_measured, double dt, const GainConfig& cfg,
                           const CameraExtrinsics& cam);

struct BundleLift {
    Eigen::VectorXd gamma_prime;  // total-space tangent at the origin
    AlgebraElement delta;
};

/// Chooses the total-space correction reproducing `Gamma` in the chart that moves the estimated
/// landmarks least (Sigma-weighted), then maps it to the algebra.
BundleLift bundle_lift(const FilterState& fs, const Eigen::VectorXd& Gamma, const CameraExtrinsics& cam);
/// The weighted landmark-motion cost minimised by bundle_lift.
double bundle_cost(const FilterState& fs, const Eigen::VectorXd& gamma_prime, const CameraExtrinsics& cam);

struct Correction {
    Eigen::Matrix<double, 6, 1> beta = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::VectorXd Gamma;
    BundleLift lift;
    Eigen::MatrixXd Sigma;  // posterior
    Eigen::VectorXd residual;
    std::vector<int> used_ids;
    std::vector<int> dropped_ids;
};

/// Kalman gain applied to the bearing residual. Pure; see apply_correction.
Correction compute_correction(const FilterState& fs, const MeasurementBatch& z, const GainConfig& cfg,
                              const CameraExtrinsics& cam);
/// b <- b + beta, X <- exp(Delta) X, Sigma <- posterior.
void apply_correction(FilterState& fs, const Correction& c);
Correction update(FilterState& fs, const MeasurementBatch& z, const GainConfig& cfg, const CameraExtrinsics& cam);

/// Depth given to a new landmark: cfg.landmark_depth, or the median estimated depth once enough exist.
double nominal_depth(const FilterState& fs, const GainConfig& cfg, const CameraExtrinsics& cam);
/// Registers `id` at the nominal depth along `bearing` with identity Q and zero cross-covariance.
void add_landmark(FilterState& fs, int id, const Eigen::Vector3d& bearing, const GainConfig& cfg,
                  const CameraExtrinsics& cam);
void remove_landmark(FilterState& fs, int id);

}  // namespace eqfvio
