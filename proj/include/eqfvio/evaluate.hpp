#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "eqfvio/lie.hpp"

namespace eqfvio {

inline constexpr double kMatchTolerance = 5e-3;

struct TrajectorySample {
    double t = 0.0;
    Pose3d pose;
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};
using Trajectory3 = std::vector<TrajectorySample>;

/// Index pairs (estimate, truth) of nearest-in-time samples within `tolerance` seconds.
std::vector<std::pair<std::size_t, std::size_t>> match_by_time(const Trajectory3& estimate, const Trajectory3& truth,
                                                                double tolerance = kMatchTolerance);

struct GaugeAlignment {
    GaugeElementd gauge;  // aligned = gauge_act(gauge, estimate)
    bool degenerate = false;
};

/// Yaw and translation minimising the summed squared position error between matched pairs.
/// Yaw comes from a 2D Procrustes fit of the centred horizontal coordinates; when those
/// vanish the yaw is indeterminate, 0 is used and `degenerate` is set.
GaugeAlignment align_gauge(const std::vector<Eigen::Vector3d>& estimate, const std::vector<Eigen::Vector3d>& truth);

/// Applies gauge_act(gauge, .) to every pose of a trajectory.
Trajectory3 apply_gauge(const GaugeElementd& gauge, const Trajectory3& traj);

struct Evaluation {
    GaugeAlignment alignment;
    std::vector<double> times;
    std::vector<Eigen::Vector3d> aligned;
    std::vector<Eigen::Vector3d> reference;
    std::vector<double> errors;
    double rmse = 0.0;
};

/// Matches, aligns and measures. `from_time` restricts both alignment and error to t >= from_time.
/// Throws std::runtime_error when nothing overlaps.
Evaluation evaluate_trajectory(const Trajectory3& estimate, const Trajectory3& truth, double from_time = -1e300);

/// Root mean square of position differences between time-matched samples (no alignment).
double rmse(const Trajectory3& aligned, const Trajectory3& truth);

/// Linear-interpolated percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

}  // namespace eqfvio
