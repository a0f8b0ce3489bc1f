#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eqfvio/dynamics.hpp"
#include "eqfvio/eqf.hpp"
#include "eqfvio/state.hpp"

namespace eqfvio {

// ---- finite-difference references -------------------------------------------------

/// d/dh of the chart error between the flowing true state and the observer driven by the lift:
///   eps( Phi( exp(-h Lambda) X^{-1}, xi_h ) ),  xi = Phi(X, eps^{-1}(eps)),  Lambda from u_hat,
/// with xi_h following the true dynamics under u_true.
Eigen::VectorXd error_rate(const FilterState& fs, const ImuInput& u_hat, const Eigen::VectorXd& eps,
                           const ImuInput& u_true, const CameraExtrinsics& cam, double gravity = kDefaultGravity);

/// Jacobians of error_rate with respect to eps (at 0) and to the true input (at u_hat).
Eigen::MatrixXd state_matrix_oracle(const FilterState& fs, const ImuInput& u_hat, const CameraExtrinsics& cam,
                                    double gravity = kDefaultGravity, double step = 1e-5);
Eigen::MatrixXd input_matrix_oracle(const FilterState& fs, const ImuInput& u_hat, const CameraExtrinsics& cam,
                                    double gravity = kDefaultGravity, double step = 1e-5);
/// Jacobian at 0 of eps -> delta(h(eps^{-1}(eps))).
Eigen::MatrixXd output_matrix_oracle(const TotalState& origin, const CameraExtrinsics& cam, double step = 1e-5);

/// d/dh Phi(exp(h Lambda(xi, u)), xi) at h = 0 as a TotalTangent vector.
Eigen::VectorXd lifted_velocity(const TotalState& xi, const ImuInput& u, const CameraExtrinsics& cam,
                                double gravity = kDefaultGravity, double step = 1e-5);

// ---- property suites ---------------------------------------------------------------

struct CheckResult {
    std::string name;
    double error = 0.0;      // worst value observed
    double tolerance = 0.0;  // pass iff error < tolerance
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

/// Associativity, identity and inverse for the six groups.
CheckResult check_group_axioms(std::uint64_t seed, int samples = 1000);
/// Action axioms, gauge invariance of output and dynamics, output equivariance.
CheckResult check_action_equivariance(std::uint64_t seed, int samples = 1000);
/// dPhi_xi(Lambda(xi, u)) = f(xi, u).
CheckResult check_lift(std::uint64_t seed, int samples = 500);
/// A0, B and C0 against their finite-difference references.
CheckResult check_linearisation(std::uint64_t seed, int trials_per_size = 3);
/// Constraint satisfaction, gauge local optimality and the zero case of bundle_lift.
CheckResult check_bundle_lift(std::uint64_t seed, int samples = 200);

std::vector<CheckResult> run_oracle_suite(std::uint64_t seed = 7);

}  // namespace eqfvio
