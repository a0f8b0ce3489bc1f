#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "eqfvio/dynamics.hpp"
#include "eqfvio/eqf.hpp"
#include "eqfvio/state.hpp"

namespace eqfvio {

/// Seeded random draws of group elements, states and filter states for property checks.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double normal() { return n01_(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Eigen::Vector3d vector3(double scale = 1.0) { return scale * Eigen::Vector3d(normal(), normal(), normal()); }
    Eigen::VectorXd vector(Eigen::Index n, double scale = 1.0);
    Eigen::Vector3d unit3();

    Rot3d rotation();
    Pose3d pose(double translation_scale = 1.0);
    ExtPosed ext_pose();
    ScaledRotd scaled_rotation(double log_scale_range = 0.7);
    GaugeElementd gauge();

    /// Random camera extrinsics with translation of order 10 cm.
    CameraExtrinsics extrinsics();
    ImuInput input();

    /// State whose landmarks sit at camera depths in [min_depth, max_depth].
    TotalState state(std::size_t n, const CameraExtrinsics& cam, double min_depth = 1.0, double max_depth = 5.0);
    SymElement sym_element(const std::vector<int>& ids);

    /// Symmetric positive-definite matrix with eigenvalues roughly in [floor, floor + scale^2 * dim].
    Eigen::MatrixXd spd(Eigen::Index dim, double scale = 0.3, double floor = 0.05);

    /// Filter with a random origin, observer state and covariance.
    FilterState filter_state(std::size_t n, const CameraExtrinsics& cam);

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> n01_;
};

}  // namespace eqfvio
