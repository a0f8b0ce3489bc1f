#pragma once

#include <string>
#include <vector>

#include "eqfvio/eqf.hpp"
#include "eqfvio/evaluate.hpp"

namespace eqfvio {

struct PipelineOptions {
    int max_landmarks = 50;
    int min_landmarks = 40;  // new tracks are registered only below this count
};

struct DiagnosticsRow {
    double t = 0.0;
    int landmarks = 0;
    double sigma_trace = 0.0;
    double propagate_ms = 0.0;  // since the previous row
    double update_ms = 0.0;     // since the previous row
};

struct RunResult {
    Trajectory3 trajectory;  // one sample per IMU reading
    std::vector<DiagnosticsRow> diagnostics;
    std::vector<std::string> warnings;
    FilterState final_state;
};

/// Processes IMU samples and feature frames in timestamp order. Each IMU reading is held
/// until the next one; a frame propagates up to its own time, adjusts the landmark registry
/// and then applies the update.
RunResult run_filter(const std::vector<ImuInput>& imu, const std::vector<MeasurementBatch>& frames,
                     const CameraExtrinsics& cam, const GainConfig& gains, const PipelineOptions& opts = {});

/// Pose with R^T e3 along the measured specific force and zero yaw.
Pose3d level_from_accel(const Eigen::Vector3d& accel);

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows);

}  // namespace eqfvio
