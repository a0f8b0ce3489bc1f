#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqfvio/dynamics.hpp"
#include "eqfvio/eqf.hpp"
#include "eqfvio/evaluate.hpp"
#include "eqfvio/state.hpp"

namespace eqfvio {

inline constexpr double kBearingNormTolerance = 1e-6;

/// A malformed input file; the message carries the path and line number.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `t,wx,wy,wz,ax,ay,az` with strictly increasing t.
std::vector<ImuInput> read_imu_csv(std::istream& in, const std::string& name = "imu");
std::vector<ImuInput> read_imu_csv(const std::string& path);
void write_imu_csv(std::ostream& out, const std::vector<ImuInput>& imu);

/// `t,id,bx,by,bz`, grouped into batches by identical t.
std::vector<MeasurementBatch> read_features_csv(std::istream& in, const std::string& name = "features");
std::vector<MeasurementBatch> read_features_csv(const std::string& path);
void write_features_csv(std::ostream& out, const std::vector<MeasurementBatch>& frames);

/// `t,px,py,pz[,qw,qx,qy,qz[,vx,vy,vz]]`; missing orientation is identity.
Trajectory3 read_trajectory_csv(std::istream& in, const std::string& name = "trajectory");
Trajectory3 read_trajectory_csv(const std::string& path);
/// Filter output: `t,px,py,pz,qw,qx,qy,qz,vx,vy,vz`.
void write_trajectory_csv(std::ostream& out, const Trajectory3& traj);
/// Ground truth: `t,px,py,pz,qw,qx,qy,qz`.
void write_truth_csv(std::ostream& out, const Trajectory3& traj);

/// Key-value file with qw, qx, qy, qz, tx, ty, tz (body from camera).
CameraExtrinsics read_extrinsics(const std::string& path);
std::string extrinsics_text(const CameraExtrinsics& cam);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace eqfvio
