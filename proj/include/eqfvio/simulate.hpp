#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eqfvio/config.hpp"
#include "eqfvio/dynamics.hpp"
#include "eqfvio/eqf.hpp"
#include "eqfvio/state.hpp"

namespace eqfvio {

enum class TrajectoryKind { Circle, Lissajous, Stationary };

/// Circle heading. Tangent flight keeps the body-frame IMU readings constant, which leaves the
/// metric scale and the lateral accelerometer bias indistinguishable. A fixed heading never rotates,
/// so horizontal accelerometer bias hides behind tilt. Wobble adds attitude oscillation to tangent.
enum class Heading { Tangent, Fixed, Wobble };

struct ScenarioConfig {
    TrajectoryKind kind = TrajectoryKind::Circle;
    double radius = 2.0;   // circle radius, lissajous x amplitude
    double period = 10.0;  // circle period, lissajous base period
    double height = 1.0;
    Heading heading = Heading::Tangent;
    double duration = 20.0;
    double imu_rate = 200.0;
    double camera_rate = 20.0;

    int landmarks = 30;
    double shell_min = 4.0;  // landmarks spawn at this range of distances from the trajectory centre
    double shell_max = 6.0;
    double fov_deg = 0.0;         // full cone angle about the optical axis; 0 sees everything
    double track_lifetime = 0.0;  // seconds; 0 keeps every track alive

    double gyro_noise = 0.0;      // rad/s/sqrt(Hz)
    double accel_noise = 0.0;     // m/s^2/sqrt(Hz)
    double bearing_noise_deg = 0.0;
    double bias_walk_gyro = 0.0;  // rad/s^2/sqrt(Hz)
    double bias_walk_accel = 0.0;
    BiasState bias;

    double gravity = kDefaultGravity;
    CameraExtrinsics camera;
    std::uint64_t seed = 1;

    static ScenarioConfig from_key_values(const KeyValues& kv);
    static ScenarioConfig load(const std::string& path);
    void validate() const;
};

/// Noise-free kinematics of a scenario trajectory.
class Trajectory {
public:
    explicit Trajectory(const ScenarioConfig& cfg) : cfg_(cfg) {}

    Pose3d pose(double t) const;
    /// Body-frame velocity.
    Eigen::Vector3d velocity(double t) const;
    /// Noise- and bias-free IMU reading.
    ImuInput input(double t) const;
    Eigen::Vector3d centre() const { return {0.0, 0.0, cfg_.height}; }

private:
    // inertial position derivatives and ZYX angles with their rates
    void evaluate(double t, Eigen::Vector3d& x, Eigen::Vector3d& xd, Eigen::Vector3d& xdd, Eigen::Vector3d& ang,
                  Eigen::Vector3d& angd) const;

    ScenarioConfig cfg_;
};

struct TruthSample {
    double t = 0.0;
    TotalState state;
    BiasState bias;
};

struct Scenario {
    std::vector<TruthSample> truth;
    std::vector<ImuInput> imu;
    std::vector<MeasurementBatch> frames;
    std::vector<Landmark> landmarks;  // true inertial landmark positions by physical point
    CameraExtrinsics camera;
};

/// Samples the trajectory, corrupts the IMU with bias and white noise, and emits bearings.
/// Throws ExceptionSetError if a landmark comes within `min_depth` of the camera.
Scenario generate_scenario(const ScenarioConfig& cfg, double min_depth = 0.5);

/// Gains matching the scenario noise, with the initial state set to the truth at t = 0.
GainConfig scenario_gains(const ScenarioConfig& cfg, const Scenario& s);

}  // namespace eqfvio
