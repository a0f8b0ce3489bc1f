#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eqfvio/differential.hpp"
#include "eqfvio/evaluate.hpp"
#include "eqfvio/sampler.hpp"
#include "eqfvio/simulate.hpp"
#include "support.hpp"

using namespace eqfvio;
using namespace eqfvio::test;

namespace {

Trajectory3 truth_trajectory(const Scenario& s) {
    Trajectory3 t;
    for (const auto& ts : s.truth) {
        t.push_back({ts.t, ts.state.pose, ts.state.velocity});
    }
    return t;
}

Trajectory3 gauge_moved(const GaugeElementd& S, const Trajectory3& traj) {
    Trajectory3 out = traj;
    for (auto& p : out) {
        TotalState xi;
        xi.pose = p.pose;
        p.pose = gauge_act(S, xi).pose;
    }
    return out;
}

}  // namespace

TEST_CASE("stationary scenario reads pure gravity") {
    ScenarioConfig c;
    c.kind = TrajectoryKind::Stationary;
    c.duration = 1.0;
    const Scenario s = generate_scenario(c);
    REQUIRE(s.imu.size() == 201);
    for (std::size_t k = 0; k < s.imu.size(); ++k) {
        const Eigen::Vector3d g = c.gravity * (s.truth[k].state.pose.rotation().inverse() * Eigen::Vector3d::UnitZ());
        CHECK(max_abs(s.imu[k].omega) == 0.0);
        CHECK(max_abs(s.imu[k].accel - g) < 1e-14);
    }
}

TEST_CASE("truth is an integral curve of the dynamics") {
    for (auto kind : {TrajectoryKind::Circle, TrajectoryKind::Lissajous}) {
        for (auto heading : {Heading::Tangent, Heading::Fixed, Heading::Wobble}) {
            ScenarioConfig c;
            c.kind = kind;
            c.heading = heading;
            c.duration = 2.0;
            const Scenario s = generate_scenario(c);
            const Trajectory traj(c);
            double worst = 0.0;
            for (std::size_t k = 0; k + 1 < s.truth.size(); k += 7) {
                const TotalState next = rk4(s.truth[k].state, [&](double t) { return traj.input(t); }, s.truth[k].t,
                                            s.truth[k + 1].t - s.truth[k].t, 5);
                worst = std::max(worst, state_distance(next, s.truth[k + 1].state));
            }
            CHECK(worst < 1e-8);
        }
    }
}

TEST_CASE("fixed seed gives identical streams") {
    ScenarioConfig c;
    c.duration = 2.0;
    c.gyro_noise = 1e-3;
    c.accel_noise = 1e-2;
    c.bearing_noise_deg = 0.2;
    c.bias_walk_accel = 1e-3;
    const Scenario a = generate_scenario(c);
    const Scenario b = generate_scenario(c);
    REQUIRE(a.imu.size() == b.imu.size());
    for (std::size_t k = 0; k < a.imu.size(); ++k) {
        CHECK(a.imu[k].omega == b.imu[k].omega);
        CHECK(a.imu[k].accel == b.imu[k].accel);
    }
    REQUIRE(a.frames.size() == b.frames.size());
    for (std::size_t k = 0; k < a.frames.size(); ++k) {
        REQUIRE(a.frames[k].bearings.size() == b.frames[k].bearings.size());
        for (std::size_t i = 0; i < a.frames[k].bearings.size(); ++i) {
            CHECK(a.frames[k].bearings[i].bearing == b.frames[k].bearings[i].bearing);
        }
    }
    c.seed = 2;
    CHECK(generate_scenario(c).imu[5].accel != a.imu[5].accel);
}

TEST_CASE("bearing noise rotates on the sphere by the configured angle") {
    ScenarioConfig c;
    c.duration = 5.0;
    c.bearing_noise_deg = 0.5;
    const Scenario s = generate_scenario(c);
    double sum = 0.0;
    int count = 0;
    for (const auto& f : s.frames) {
        const std::size_t k = static_cast<std::size_t>(std::llround(f.t * c.imu_rate));
        const BearingSet clean = measure(s.truth[k].state, s.camera);
        for (std::size_t i = 0; i < f.bearings.size(); ++i) {
            CHECK(std::abs(f.bearings[i].bearing.norm() - 1.0) < 1e-15);
            const double a = std::acos(std::clamp(f.bearings[i].bearing.dot(clean[i].y), -1.0, 1.0));
            sum += a * a;
            ++count;
        }
    }
    CHECK(std::sqrt(sum / count) == doctest::Approx(0.5 * M_PI / 180.0).epsilon(0.05));
}

TEST_CASE("field of view and track lifetimes") {
    ScenarioConfig c;
    c.duration = 4.0;
    c.fov_deg = 90.0;
    c.track_lifetime = 1.0;
    const Scenario s = generate_scenario(c);
    std::size_t most = 0;
    for (const auto& f : s.frames) {
        most = std::max(most, f.bearings.size());
        for (const auto& m : f.bearings) {
            CHECK(m.bearing.z() >= std::cos(M_PI / 4) - 1e-12);
        }
    }
    CHECK(most < static_cast<std::size_t>(c.landmarks));
    // after one lifetime every physical point has been renumbered at least once
    bool renumbered = false;
    for (const auto& m : s.frames.back().bearings) {
        renumbered = renumbered || m.id >= c.landmarks;
    }
    CHECK(renumbered);
}

TEST_CASE("generation refuses landmarks inside the exception set") {
    ScenarioConfig c;
    c.kind = TrajectoryKind::Stationary;  // sits at the shell centre
    c.shell_min = 0.3;
    c.shell_max = 0.4;
    CHECK_THROWS_AS(generate_scenario(c, 0.5), ExceptionSetError);
}

TEST_CASE("scenario configuration") {
    const ScenarioConfig c = ScenarioConfig::from_key_values(
        parse_key_values("kind = lissajous\nheading = wobble\nseed = 9\nbias_gyro_x = 0.01\ncam_tx = 0.1\n"));
    CHECK(c.kind == TrajectoryKind::Lissajous);
    CHECK(c.heading == Heading::Wobble);
    CHECK(c.seed == 9);
    CHECK(c.bias.b_omega.x() == 0.01);
    CHECK(c.camera.body_from_camera.translation().x() == 0.1);
    CHECK_THROWS_AS(ScenarioConfig::from_key_values(parse_key_values("kind = spiral\n")), std::invalid_argument);
    CHECK_THROWS_AS(ScenarioConfig::from_key_values(parse_key_values("imu_rate = 10\ncamera_rate = 20\n")),
                    std::invalid_argument);
    CHECK_THROWS_AS(ScenarioConfig::from_key_values(parse_key_values("gyro_noise = -1\n")), std::invalid_argument);
}

TEST_CASE("scenario gains carry the truth and the scene depth") {
    ScenarioConfig c;
    c.gyro_noise = 1e-3;
    c.accel_noise = 1e-2;
    const Scenario s = generate_scenario(c);
    const GainConfig g = scenario_gains(c, s);
    CHECK(g.input_gyro == doctest::Approx(1e-6));
    CHECK(g.input_accel == doctest::Approx(1e-4));
    REQUIRE(g.init_pose.has_value());
    CHECK(pose_distance(*g.init_pose, s.truth.front().state.pose) == 0.0);
    CHECK(g.landmark_depth > c.shell_min - c.radius);
    CHECK(g.landmark_depth < c.shell_max + c.radius);
}

TEST_CASE("numeric differential") {
    const VectorMap id = [](const Eigen::VectorXd& x) { return x; };
    CHECK(max_abs(numeric_differential(id, Eigen::VectorXd::Zero(4)) - Eigen::MatrixXd::Identity(4, 4)) < 1e-12);
    // a binary step keeps x +- h exact away from zero
    CHECK(max_abs(numeric_differential(id, Eigen::VectorXd::Ones(4), std::ldexp(1.0, -17)) -
                  Eigen::MatrixXd::Identity(4, 4)) < 1e-12);

    Sampler s(61);
    const Eigen::MatrixXd M = s.spd(3);
    const VectorMap quad = [&](const Eigen::VectorXd& x) {
        return Eigen::VectorXd::Constant(1, x.dot(M * x));
    };
    const Eigen::VectorXd x0 = s.vector(3);
    CHECK(max_abs(numeric_differential(quad, x0) - 2.0 * (M * x0).transpose()) < 1e-8);
    CHECK(max_abs(numeric_differential(quad, x0, 1e-3, true) - 2.0 * (M * x0).transpose()) < 1e-8);

    const VectorMap cubic = [](const Eigen::VectorXd& x) { return x.array().cube().matrix(); };
    const Eigen::MatrixXd Jp = numeric_differential(cubic, x0, 1e-2);
    const Eigen::MatrixXd Jr = numeric_differential(cubic, x0, 1e-2, true);
    const Eigen::MatrixXd exact = (3.0 * x0.array().square()).matrix().asDiagonal();
    CHECK(max_abs(Jr - exact) < max_abs(Jp - exact) * 1e-3);
}

TEST_CASE("gauge alignment recovers a planted gauge") {
    ScenarioConfig c;
    c.duration = 5.0;
    const Trajectory3 truth = truth_trajectory(generate_scenario(c));
    Sampler s(62);
    for (int k = 0; k < 20; ++k) {
        const GaugeElementd S = s.gauge();
        const Trajectory3 est = gauge_moved(S, truth);
        const Evaluation ev = evaluate_trajectory(est, truth);
        CHECK(ev.rmse < 1e-10);
        const GaugeElementd back = ev.alignment.gauge * S;
        CHECK(std::abs(back.yaw()) < 1e-10);
        CHECK(max_abs(back.translation()) < 1e-9);
    }
    const Evaluation same = evaluate_trajectory(truth, truth);
    CHECK(std::abs(same.alignment.gauge.yaw()) < 1e-12);
    CHECK(max_abs(same.alignment.gauge.translation()) < 1e-12);
    CHECK_FALSE(same.alignment.degenerate);
}

TEST_CASE("a single point aligns by translation only") {
    const GaugeAlignment a = align_gauge({Eigen::Vector3d(1, 2, 3)}, {Eigen::Vector3d(0, 0, 1)});
    CHECK(a.degenerate);
    CHECK(a.gauge.yaw() == 0.0);
    TotalState xi;
    xi.pose = Pose3d(Rot3d::identity(), Eigen::Vector3d(1, 2, 3));
    CHECK(max_abs(gauge_act(a.gauge, xi).pose.translation() - Eigen::Vector3d(0, 0, 1)) < 1e-15);
}

TEST_CASE("rmse") {
    ScenarioConfig c;
    c.duration = 3.0;
    const Trajectory3 truth = truth_trajectory(generate_scenario(c));
    CHECK(rmse(truth, truth) == 0.0);

    Trajectory3 shifted = truth;
    for (auto& p : shifted) {
        p.pose = Pose3d(p.pose.rotation(), p.pose.translation() + Eigen::Vector3d(1, 0, 0));
    }
    CHECK(evaluate_trajectory(shifted, truth).rmse < 1e-12);

    Sampler s(63);
    Trajectory3 noisy = truth;
    for (auto& p : noisy) {
        p.pose = Pose3d(p.pose.rotation(), p.pose.translation() + 0.05 * s.unit3());
    }
    CHECK(rmse(noisy, truth) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("time matching respects the tolerance") {
    Trajectory3 a, b;
    for (int k = 0; k < 5; ++k) {
        a.push_back({0.1 * k, Pose3d::identity(), Eigen::Vector3d::Zero()});
        b.push_back({0.1 * k + (k % 2 ? 0.004 : 0.006), Pose3d::identity(), Eigen::Vector3d::Zero()});
    }
    const auto m = match_by_time(a, b);
    REQUIRE(m.size() == 2);
    CHECK(m[0].first == 1);
    CHECK(m[1].first == 3);
    CHECK_THROWS_AS(evaluate_trajectory(a, Trajectory3{}), std::runtime_error);
}

TEST_CASE("percentile interpolates") {
    const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
    CHECK(percentile(v, 0.0) == 1.0);
    CHECK(percentile(v, 100.0) == 4.0);
    CHECK(percentile(v, 50.0) == doctest::Approx(2.5));
}
