#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "eqfvio/charts.hpp"
#include "eqfvio/eqf.hpp"
#include "eqfvio/oracle.hpp"
#include "eqfvio/sampler.hpp"
#include "eqfvio/simulate.hpp"
#include "eqfvio/sphere.hpp"
#include "support.hpp"

using namespace eqfvio;
using namespace eqfvio::test;

namespace {

bool positive_definite(const Eigen::MatrixXd& S) {
    return Eigen::LLT<Eigen::MatrixXd>(S).info() == Eigen::Success;
}

double asymmetry(const Eigen::MatrixXd& S) { return max_abs(S - S.transpose()); }

ImuInput hover_input(const Pose3d& P) {
    return {Eigen::Vector3d::Zero(), kDefaultGravity * (P.rotation().inverse() * Eigen::Vector3d::UnitZ()), 0.0};
}

// Registers every landmark of `truth` at its true depth.
FilterState filter_at(const TotalState& truth, const CameraExtrinsics& cam, const GainConfig& cfg) {
    FilterState fs = make_filter(truth.pose, truth.velocity, BiasState{}, cfg);
    for (const auto& lm : truth.landmarks) {
        GainConfig g = cfg;
        g.depth_median_min = 1 << 30;
        g.landmark_depth = camera_point(truth, lm, cam).norm();
        add_landmark(fs, lm.id, camera_point(truth, lm, cam).normalized(), g, cam);
    }
    return fs;
}

MeasurementBatch perfect(const TotalState& truth, const CameraExtrinsics& cam, double t = 0.0) {
    MeasurementBatch z;
    z.t = t;
    for (const auto& b : measure(truth, cam)) {
        z.bearings.push_back({b.id, b.y});
    }
    return z;
}

}  // namespace

TEST_CASE("zero step leaves the filter unchanged; oversized steps are refused") {
    Sampler s(41);
    const CameraExtrinsics cam = s.extrinsics();
    FilterState fs = s.filter_state(3, cam);
    const FilterState before = fs;
    GainConfig cfg;
    propagate(fs, s.input(), 0.0, cfg, cam);
    CHECK(max_abs(fs.Sigma - before.Sigma) == 0.0);
    CHECK(state_distance(estimated_state(fs, cam), estimated_state(before, cam)) == 0.0);
    CHECK_THROWS_AS(propagate(fs, s.input(), 0.2, cfg, cam), std::invalid_argument);
}

TEST_CASE("Riccati step with every term zero is constant") {
    Sampler s(42);
    Eigen::MatrixXd S = s.spd(riccati_dim(2));
    const Eigen::MatrixXd S0 = S;
    propagate_covariance(S, Eigen::MatrixXd::Zero(chart_dim(2), chart_dim(2)), Eigen::MatrixXd::Zero(chart_dim(2), 6),
                         Eigen::Matrix<double, 6, 6>::Zero(), Eigen::MatrixXd::Zero(riccati_dim(2), riccati_dim(2)),
                         0.01);
    CHECK(max_abs(S - S0) < 1e-15);
}

TEST_CASE("hover propagation holds the pose") {
    Sampler s(43);
    const CameraExtrinsics cam = s.extrinsics();
    TotalState truth = s.state(5, cam, 2.0, 6.0);
    truth.velocity.setZero();
    for (auto scheme : {PropagationScheme::Lift, PropagationScheme::Exact}) {
        GainConfig cfg;
        cfg.scheme = scheme;
        FilterState fs = filter_at(truth, cam, cfg);
        const ImuInput u = hover_input(truth.pose);
        for (int k = 0; k < 200; ++k) {
            propagate(fs, u, 0.005, cfg, cam);
        }
        const TotalState est = estimated_state(fs, cam);
        CHECK((est.pose.translation() - truth.pose.translation()).norm() < 1e-6);
        CHECK(max_abs(est.pose.matrix() - truth.pose.matrix()) < 1e-6);
    }
}

TEST_CASE("state matrix special cases") {
    Sampler s(44);
    const CameraExtrinsics cam = s.extrinsics();
    FilterState fs = s.filter_state(3, cam);
    ImuInput u = s.input();
    u.omega.setZero();

    // zero camera velocity: with omega = 0 that needs v = 0
    FilterState still = fs;
    still.X.ext = ExtPosed(still.X.ext.pose(), still.origin.velocity);
    CHECK(max_abs(estimated_state(still, cam).velocity) < 1e-14);
    const Eigen::MatrixXd A = compute_state_matrix(still, u, cam);
    CHECK(max_abs(A.bottomRightCorner(9, 9)) < 1e-12);

    const Eigen::MatrixXd Ag = compute_state_matrix(fs, s.input(), cam, 0.0);
    CHECK(max_abs(Ag.leftCols(2)) < 1e-15);
}

TEST_CASE("input matrix special cases") {
    Sampler s(45);
    const CameraExtrinsics id = CameraExtrinsics::identity();
    FilterState fs = s.filter_state(2, id);
    const ImuInput u = s.input();
    const Eigen::MatrixXd B = compute_input_matrix(fs, u, id);
    const TotalState est = estimated_state(fs, id);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const Eigen::Vector3d q = camera_point(est, est.landmarks[i], id);
        const Eigen::Matrix3d expected = fs.X.landmarks[i].Q.matrix() * skew(q);
        CHECK(max_abs(B.block(5 + 3 * static_cast<Eigen::Index>(i), 0, 3, 3) - expected) < 1e-12);
        CHECK(max_abs(B.block(5 + 3 * static_cast<Eigen::Index>(i), 3, 3, 3)) == 0.0);
    }

    FilterState level = fs;
    level.origin.pose = Pose3d::identity();
    level.X.ext = ExtPosed(Pose3d::identity(), level.origin.velocity);
    const Eigen::MatrixXd B0 = compute_input_matrix(level, u, id);
    CHECK(max_abs(B0.block(2, 0, 3, 3)) < 1e-14);
    CHECK(max_abs(B0.block(2, 3, 3, 3) - Eigen::Matrix3d::Identity()) < 1e-14);
}

TEST_CASE("output matrix") {
    Sampler s(46);
    const CameraExtrinsics cam = s.extrinsics();
    const TotalState origin = s.state(4, cam);
    const Eigen::MatrixXd C = compute_output_matrix(origin, cam);
    CHECK(C.rows() == 8);
    CHECK(C.cols() == chart_dim(4));
    CHECK(max_abs(C.leftCols(5)) == 0.0);
    for (Eigen::Index i = 0; i < 4; ++i) {
        const Eigen::Vector3d q = camera_point(origin, origin.landmarks[static_cast<std::size_t>(i)], cam);
        CHECK(max_abs(C.block(2 * i, 5 + 3 * i, 2, 3) * q) < 1e-12);
    }

    TotalState one;
    one.landmarks.push_back({1, Eigen::Vector3d::UnitZ()});
    const Eigen::MatrixXd C1 = compute_output_matrix(one, CameraExtrinsics::identity());
    const Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();
    const Eigen::Matrix<double, 2, 3> expected =
        stereo_chart_jacobian(e3, e3) * Eigen::Vector3d(1, 1, 0).asDiagonal().toDenseMatrix();
    CHECK(max_abs(C1.rightCols(3) - expected) < 1e-15);
}

TEST_CASE("linearisation matches finite differences") {
    const CheckResult r = check_linearisation(47, 3);
    INFO(r.detail);
    CHECK(r.passed);
}

TEST_CASE("zero residual gives a zero correction and a contracted covariance") {
    Sampler s(48);
    const CameraExtrinsics cam = s.extrinsics();
    FilterState fs = s.filter_state(4, cam);
    const TotalState est = estimated_state(fs, cam);
    const Correction c = compute_correction(fs, perfect(est, cam), GainConfig{}, cam);
    CHECK(max_abs(c.residual) < 1e-14);
    CHECK(max_abs(c.beta) < 1e-12);
    CHECK(max_abs(c.lift.delta.vector()) < 1e-12);
    const Eigen::MatrixXd diff = fs.Sigma - c.Sigma;
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (diff + diff.transpose())).eigenvalues().minCoeff() >
          -1e-12);
    CHECK(c.Sigma.trace() < fs.Sigma.trace());
}

TEST_CASE("without bias cross covariance the bias is not corrected") {
    Sampler s(49);
    const CameraExtrinsics cam = CameraExtrinsics::identity();
    TotalState truth = s.state(1, cam);
    GainConfig cfg;
    FilterState fs = make_filter(truth.pose, truth.velocity, BiasState{}, cfg);
    add_landmark(fs, 1, Eigen::Vector3d(0.1, 0.2, 1.0).normalized(), cfg, cam);
    MeasurementBatch z;
    z.bearings.push_back({1, Eigen::Vector3d(0.15, 0.18, 1.0).normalized()});
    const Correction c = compute_correction(fs, z, cfg, cam);
    CHECK(max_abs(c.residual) > 1e-3);
    CHECK(max_abs(c.beta) == 0.0);
}

TEST_CASE("correction is linear in the residual") {
    Sampler s(50);
    const CameraExtrinsics cam = s.extrinsics();
    const FilterState fs = s.filter_state(5, cam);
    Eigen::VectorXd z0 = s.vector(10, 1e-3);
    auto batch_for = [&](const Eigen::VectorXd& z) {
        MeasurementBatch b;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const auto& y0 = fs.origin_bearings[i];
            const Eigen::Vector3d e = stereo_chart_inv(y0.y, z.segment<2>(2 * static_cast<Eigen::Index>(i)));
            b.bearings.push_back({y0.id, fs.X.landmarks[i].Q.rotation().inverse() * e});
        }
        return b;
    };
    const GainConfig cfg;
    const Correction c1 = compute_correction(fs, batch_for(z0), cfg, cam);
    CHECK(max_abs(c1.residual - z0) < 1e-12);
    for (double k : {-2.0, 0.5, 3.0}) {
        const Correction ck = compute_correction(fs, batch_for(k * z0), cfg, cam);
        CHECK(max_abs(ck.beta - k * c1.beta) < 1e-9);
        CHECK(max_abs(ck.Gamma - k * c1.Gamma) < 1e-9);
        CHECK(max_abs(ck.lift.delta.vector() - k * c1.lift.delta.vector()) < 1e-9);
    }
}

TEST_CASE("perfect bearings shrink a perturbed estimate monotonically") {
    Sampler s(51);
    const CameraExtrinsics cam = s.extrinsics();
    const TotalState truth = s.state(12, cam, 2.0, 6.0);
    GainConfig cfg;
    cfg.bearing = 1e-6;
    FilterState fs = filter_at(truth, cam, cfg);

    std::vector<int> ids = fs.ids();
    SymElement pert = SymElement::identity(ids);
    pert.ext = ExtPosed(Pose3d(Rot3d::exp(Eigen::Vector3d(0.01, -0.01, 0.02)), Eigen::Vector3d(0.02, 0.01, -0.02)),
                        Eigen::Vector3d(0.01, 0.0, 0.01));
    for (auto& lt : pert.landmarks) {
        lt.Q = ScaledRotd::exp(s.vector3(0.01), s.uniform(-0.05, 0.05));
    }
    fs.X = pert;

    auto error = [&] { return chart_epsilon(sym_act_total(fs.X.inverse(), truth, cam), fs.origin, cam).norm(); };
    double prev = error();
    for (int k = 0; k < 10; ++k) {
        update(fs, perfect(truth, cam), cfg, cam);
        const double e = error();
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("bundle lift") {
    const CheckResult r = check_bundle_lift(52, 200);
    INFO(r.detail);
    CHECK(r.passed);

    Sampler s(53);
    const CameraExtrinsics cam = s.extrinsics();
    const FilterState fs = s.filter_state(3, cam);
    const BundleLift zero = bundle_lift(fs, Eigen::VectorXd::Zero(chart_dim(3)), cam);
    CHECK(max_abs(zero.gamma_prime) == 0.0);
    CHECK(max_abs(zero.delta.vector()) == 0.0);

    // no landmarks: the minimum-norm total-space solution
    const FilterState empty = s.filter_state(0, cam);
    const Eigen::VectorXd G = s.vector(5);
    const BundleLift bl = bundle_lift(empty, G, cam);
    const Eigen::MatrixXd D = origin_chart_differential(empty.origin, cam);
    CHECK(max_abs(D * bl.gamma_prime - G) < 1e-9);
    CHECK(max_abs(gauge_directions(empty.origin).transpose() * bl.gamma_prime) < 1e-9);
}

TEST_CASE("estimated state") {
    Sampler s(54);
    const CameraExtrinsics cam = s.extrinsics();
    FilterState fs = s.filter_state(3, cam);
    fs.X = SymElement::identity(fs.ids());
    CHECK(state_distance(estimated_state(fs, cam), fs.origin) < 1e-14);

    fs.X.ext = ExtPosed(Pose3d::identity(), Eigen::Vector3d(0, 0, 1));
    const TotalState e = estimated_state(fs, cam);
    CHECK(max_abs(e.velocity - (fs.origin.velocity - Eigen::Vector3d(0, 0, 1))) < 1e-15);
    CHECK(pose_distance(e.pose, fs.origin.pose) == 0.0);

    for (int k = 0; k < 200; ++k) {
        FilterState r = s.filter_state(4, cam);
        CHECK(bearing_distance(measure(estimated_state(r, cam), cam), output_act(r.X, measure(r.origin, cam))) <
              1e-10);
    }
}

TEST_CASE("landmark registry") {
    Sampler s(55);
    const CameraExtrinsics cam = s.extrinsics();
    FilterState fs = s.filter_state(3, cam);
    const FilterState before = fs;
    GainConfig cfg;

    add_landmark(fs, 1000, s.unit3() + Eigen::Vector3d(0, 0, 2), cfg, cam);
    CHECK(fs.Sigma.rows() == riccati_dim(4));
    CHECK(max_abs(fs.Sigma.topLeftCorner(riccati_dim(3), riccati_dim(3)) - before.Sigma) == 0.0);
    CHECK(max_abs(fs.Sigma.bottomLeftCorner(3, riccati_dim(3))) == 0.0);
    CHECK_THROWS_AS(add_landmark(fs, 1000, Eigen::Vector3d::UnitZ(), cfg, cam), std::invalid_argument);

    remove_landmark(fs, 1000);
    CHECK(max_abs(fs.Sigma - before.Sigma) == 0.0);
    CHECK(max_abs(fs.C0 - before.C0) == 0.0);
    CHECK(fs.ids() == before.ids());
    CHECK(fs.X.ids() == before.X.ids());
    CHECK_THROWS_AS(remove_landmark(fs, 1000), std::invalid_argument);

    // removal from the middle keeps the other blocks
    const int mid = fs.ids()[1];
    remove_landmark(fs, mid);
    CHECK(max_abs(fs.Sigma.topLeftCorner(14, 14) - before.Sigma.topLeftCorner(14, 14)) == 0.0);
    CHECK(max_abs(fs.Sigma.bottomRightCorner(3, 3) - before.Sigma.bottomRightCorner(3, 3)) == 0.0);
    CHECK(max_abs(fs.C0 - compute_output_matrix(fs.origin, cam)) < 1e-12);
}

TEST_CASE("new landmarks start on their bearing") {
    GainConfig cfg;
    FilterState fs = make_filter(Pose3d::identity(), Eigen::Vector3d::Zero(), BiasState{}, cfg);
    add_landmark(fs, 7, Eigen::Vector3d::UnitZ(), cfg, CameraExtrinsics::identity());
    CHECK(max_abs(fs.origin.landmarks[0].p - Eigen::Vector3d::UnitZ()) == 0.0);

    Sampler s(56);
    const CameraExtrinsics cam = s.extrinsics();
    FilterState r = s.filter_state(6, cam);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector3d b = (s.unit3() + Eigen::Vector3d(0, 0, 1.5)).normalized();
        add_landmark(r, 100 + k, b, cfg, cam);
        const BearingSet y = measure(estimated_state(r, cam), cam);
        CHECK(max_abs(y.back().y - b) < 1e-12);
    }
    CHECK(max_abs(r.C0 - compute_output_matrix(r.origin, cam)) < 1e-10);
}

TEST_CASE("nominal depth follows the median once enough landmarks exist") {
    GainConfig cfg;
    cfg.landmark_depth = 1.0;
    const CameraExtrinsics cam = CameraExtrinsics::identity();
    TotalState truth;
    for (int i = 0; i < 5; ++i) {
        truth.landmarks.push_back({i, Eigen::Vector3d(0.1 * i, 0.0, 2.0 + i)});
    }
    FilterState fs = make_filter(Pose3d::identity(), Eigen::Vector3d::Zero(), BiasState{}, cfg);
    CHECK(nominal_depth(fs, cfg, cam) == 1.0);
    fs = filter_at(truth, cam, cfg);
    std::vector<double> d;
    for (const auto& lm : truth.landmarks) {
        d.push_back(lm.p.norm());
    }
    std::sort(d.begin(), d.end());
    CHECK(nominal_depth(fs, cfg, cam) == doctest::Approx(d[2]).epsilon(1e-12));
}

TEST_CASE("covariance stays positive definite under random schedules") {
    Sampler s(57);
    const CameraExtrinsics cam = s.extrinsics();
    for (int trial = 0; trial < 10; ++trial) {
        const TotalState truth = s.state(8, cam, 2.0, 8.0);
        GainConfig cfg;
        FilterState fs = filter_at(truth, cam, cfg);
        int next_id = 1000;
        for (int step = 0; step < 60; ++step) {
            switch (s.integer(0, 4)) {
                case 0:
                case 1:
                    propagate(fs, s.input(), s.uniform(0.001, 0.02), cfg, cam);
                    break;
                case 2: {
                    MeasurementBatch z;
                    for (const auto& b : measure(estimated_state(fs, cam), cam)) {
                        z.bearings.push_back({b.id, (b.y + s.vector3(1e-3)).normalized()});
                    }
                    update(fs, z, cfg, cam);
                    break;
                }
                case 3:
                    add_landmark(fs, next_id++, (s.unit3() + Eigen::Vector3d(0, 0, 2)).normalized(), cfg, cam);
                    break;
                default:
                    if (fs.size() > 1) {
                        remove_landmark(fs, fs.ids()[static_cast<std::size_t>(s.integer(0, static_cast<int>(fs.size()) - 1))]);
                    }
            }
            REQUIRE(positive_definite(fs.Sigma));
            REQUIRE(asymmetry(fs.Sigma) < 1e-10);
            REQUIRE(fs.Sigma.rows() == riccati_dim(fs.size()));
            REQUIRE(fs.X.landmarks.size() == fs.size());
        }
    }
}

TEST_CASE("bias estimate is constant without measurements") {
    Sampler s(58);
    const CameraExtrinsics cam = s.extrinsics();
    FilterState fs = s.filter_state(4, cam);
    fs.bias = BiasState{s.vector3(0.01), s.vector3(0.1)};
    const BiasState b0 = fs.bias;
    for (int k = 0; k < 100; ++k) {
        propagate(fs, s.input(), 0.005, GainConfig{}, cam);
    }
    CHECK(max_abs(fs.bias.vector() - b0.vector()) == 0.0);
}

TEST_CASE("landmarks that reach the camera are quarantined") {
    GainConfig cfg;
    cfg.min_depth = 0.05;
    const CameraExtrinsics cam = CameraExtrinsics::identity();
    TotalState truth;
    truth.velocity = Eigen::Vector3d(0, 0, 1.0);
    truth.landmarks = {{1, Eigen::Vector3d(0, 0, 0.052)}, {2, Eigen::Vector3d(0.5, 0.0, 3.0)}};
    FilterState fs = filter_at(truth, cam, cfg);
    const ImuInput u = hover_input(truth.pose);
    std::vector<int> dropped;
    for (int k = 0; k < 10 && dropped.empty(); ++k) {
        dropped = propagate(fs, u, 0.005, cfg, cam);
    }
    REQUIRE(dropped.size() == 1);
    CHECK(dropped[0] == 1);
    CHECK(fs.quarantined.count(1) == 1);
    CHECK(fs.ids() == std::vector<int>{2});
}

TEST_CASE("perfect data from the truth stays on the truth") {
    ScenarioConfig sc;
    sc.duration = 5.0;
    const Scenario s = generate_scenario(sc);
    GainConfig cfg = scenario_gains(sc, s);
    cfg.scheme = PropagationScheme::Exact;
    FilterState fs = filter_at(s.truth.front().state, s.camera, cfg);
    std::size_t f = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < s.imu.size(); ++k) {
        if (f < s.frames.size() && std::abs(s.frames[f].t - s.imu[k].t) < 1e-9) {
            update(fs, s.frames[f++], cfg, s.camera);
        }
        propagate(fs, s.imu[k], s.imu[k + 1].t - s.imu[k].t, cfg, s.camera);
        const TotalState& truth = s.truth[k + 1].state;
        worst = std::max(worst, chart_epsilon(sym_act_total(fs.X.inverse(), truth, s.camera), fs.origin, s.camera).norm());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("gain configuration") {
    const GainConfig d;
    CHECK(d.sigma0_bias == 1e-2);
    CHECK(d.sigma0_landmark == 1.0);
    CHECK(d.input_gyro == 1e-6);
    CHECK(d.input_accel == 1e-4);
    CHECK(d.bearing == 1e-4);

    const GainConfig g = GainConfig::from_key_values(parse_key_values("bearing = 2e-4\npropagation = exact\n"));
    CHECK(g.bearing == 2e-4);
    CHECK(g.scheme == PropagationScheme::Exact);
    CHECK_THROWS_AS(GainConfig::from_key_values(parse_key_values("bearingg = 1\n")), std::invalid_argument);
    CHECK_THROWS_AS(GainConfig::from_key_values(parse_key_values("bearing = -1\n")), std::invalid_argument);
    CHECK_THROWS_AS(GainConfig::from_key_values(parse_key_values("propagation = rk4\n")), std::invalid_argument);

    GainConfig h = g;
    h.init_pose = Pose3d(Rot3d::exp(Eigen::Vector3d(0.1, 0.2, 0.3)), Eigen::Vector3d(1, 2, 3));
    h.init_velocity = Eigen::Vector3d(0.5, 0, 0);
    const GainConfig back = GainConfig::from_key_values(parse_key_values(h.to_text()));
    CHECK(back.to_text() == h.to_text());
    CHECK(max_abs(back.init_pose->matrix() - h.init_pose->matrix()) < 1e-15);

    CHECK(positive_definite(d.initial_covariance(3)));
    CHECK(positive_definite(d.process_noise(3)));
    CHECK(positive_definite(d.input_noise()));
}
