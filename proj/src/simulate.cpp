#include "eqfvio/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace eqfvio {

namespace {

Eigen::Vector3d get_vector(const KeyValues& kv, const std::string& prefix, const Eigen::Vector3d& fallback) {
    return {get_double(kv, prefix + "x", fallback.x()), get_double(kv, prefix + "y", fallback.y()),
            get_double(kv, prefix + "z", fallback.z())};
}

Rot3d zyx(const Eigen::Vector3d& ang) {
    return Rot3d::yaw(ang.x()) * Rot3d::exp(ang.y() * Eigen::Vector3d::UnitY()) *
           Rot3d::exp(ang.z() * Eigen::Vector3d::UnitX());
}

Eigen::Vector3d random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n01;
    Eigen::Vector3d v;
    do {
        v = {n01(rng), n01(rng), n01(rng)};
    } while (v.norm() < 1e-9);
    return v.normalized();
}

// Rotates y by a normally distributed angle about a uniformly chosen axis orthogonal to y.
Eigen::Vector3d perturb_bearing(const Eigen::Vector3d& y, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0.0) {
        return y;
    }
    const Eigen::Vector3d b1 = y.unitOrthogonal();
    const Eigen::Vector3d b2 = y.cross(b1);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::normal_distribution<double> angle(0.0, sigma);
    const double p = phase(rng);
    const Eigen::Vector3d axis = std::cos(p) * b1 + std::sin(p) * b2;
    return (Rot3d::exp(angle(rng) * axis) * y).normalized();
}

}  // namespace

ScenarioConfig ScenarioConfig::from_key_values(const KeyValues& kv) {
    ScenarioConfig c;
    const std::string kind = get_string(kv, "kind", "circle");
    if (kind == "circle") {
        c.kind = TrajectoryKind::Circle;
    } else if (kind == "lissajous") {
        c.kind = TrajectoryKind::Lissajous;
    } else if (kind == "stationary") {
        c.kind = TrajectoryKind::Stationary;
    } else {
        throw std::invalid_argument("scenario: unknown kind " + kind);
    }
    c.radius = get_double(kv, "radius", c.radius);
    c.period = get_double(kv, "period", c.period);
    c.height = get_double(kv, "height", c.height);
    const std::string heading = get_string(kv, "heading", "tangent");
    if (heading == "tangent") {
        c.heading = Heading::Tangent;
    } else if (heading == "fixed") {
        c.heading = Heading::Fixed;
    } else if (heading == "wobble") {
        c.heading = Heading::Wobble;
    } else {
        throw std::invalid_argument("scenario: heading must be tangent, fixed or wobble, got " + heading);
    }
    c.duration = get_double(kv, "duration", c.duration);
    c.imu_rate = get_double(kv, "imu_rate", c.imu_rate);
    c.camera_rate = get_double(kv, "camera_rate", c.camera_rate);
    c.landmarks = get_int(kv, "landmarks", c.landmarks);
    c.shell_min = get_double(kv, "shell_min", c.shell_min);
    c.shell_max = get_double(kv, "shell_max", c.shell_max);
    c.fov_deg = get_double(kv, "fov_deg", c.fov_deg);
    c.track_lifetime = get_double(kv, "track_lifetime", c.track_lifetime);
    c.gyro_noise = get_double(kv, "gyro_noise", c.gyro_noise);
    c.accel_noise = get_double(kv, "accel_noise", c.accel_noise);
    c.bearing_noise_deg = get_double(kv, "bearing_noise_deg", c.bearing_noise_deg);
    c.bias_walk_gyro = get_double(kv, "bias_walk_gyro", c.bias_walk_gyro);
    c.bias_walk_accel = get_double(kv, "bias_walk_accel", c.bias_walk_accel);
    c.bias.b_omega = get_vector(kv, "bias_gyro_", c.bias.b_omega);
    c.bias.b_accel = get_vector(kv, "bias_accel_", c.bias.b_accel);
    c.gravity = get_double(kv, "gravity", c.gravity);
    c.seed = static_cast<std::uint64_t>(get_int(kv, "seed", static_cast<int>(c.seed)));

    const Eigen::Quaterniond q(get_double(kv, "cam_qw", 1.0), get_double(kv, "cam_qx", 0.0),
                               get_double(kv, "cam_qy", 0.0), get_double(kv, "cam_qz", 0.0));
    c.camera.body_from_camera = Pose3d(Rot3d(q), get_vector(kv, "cam_t", Eigen::Vector3d::Zero()));
    c.validate();
    return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) { return from_key_values(read_key_values(path)); }

void ScenarioConfig::validate() const {
    if (!(imu_rate > 0.0) || !(camera_rate > 0.0)) {
        throw std::invalid_argument("scenario: rates must be positive");
    }
    if (imu_rate < camera_rate) {
        throw std::invalid_argument("scenario: IMU rate must be at least the camera rate");
    }
    if (!(duration > 0.0) || !(period > 0.0)) {
        throw std::invalid_argument("scenario: duration and period must be positive");
    }
    if (landmarks < 0 || !(shell_min > 0.0) || shell_max < shell_min) {
        throw std::invalid_argument("scenario: bad landmark spawn parameters");
    }
    if (gyro_noise < 0.0 || accel_noise < 0.0 || bearing_noise_deg < 0.0 || bias_walk_gyro < 0.0 ||
        bias_walk_accel < 0.0 || fov_deg < 0.0 || track_lifetime < 0.0) {
        throw std::invalid_argument("scenario: noise levels must be non-negative");
    }
}

void Trajectory::evaluate(double t, Eigen::Vector3d& x, Eigen::Vector3d& xd, Eigen::Vector3d& xdd,
                          Eigen::Vector3d& ang, Eigen::Vector3d& angd) const {
    const double w = 2.0 * M_PI / cfg_.period;
    const double r = cfg_.radius;
    const double h = cfg_.height;
    switch (cfg_.kind) {
        case TrajectoryKind::Circle: {
            const double c = std::cos(w * t);
            const double s = std::sin(w * t);
            x = {r * c, r * s, h};
            xd = {-r * w * s, r * w * c, 0.0};
            xdd = {-r * w * w * c, -r * w * w * s, 0.0};
            if (cfg_.heading == Heading::Tangent) {
                ang = {w * t + M_PI / 2.0, 0.0, 0.0};
                angd = {w, 0.0, 0.0};
            } else if (cfg_.heading == Heading::Wobble) {
                // tangent plus small attitude oscillation
                ang = {w * t + M_PI / 2.0 + 0.4 * std::sin(2 * w * t), 0.3 * std::sin(3 * w * t),
                       0.4 * std::cos(2 * w * t)};
                angd = {w + 0.8 * w * std::cos(2 * w * t), 0.9 * w * std::cos(3 * w * t),
                        -0.8 * w * std::sin(2 * w * t)};
            } else {
                ang = {M_PI / 2.0, 0.0, 0.0};
                angd.setZero();
            }
            return;
        }
        case TrajectoryKind::Lissajous: {
            const double b = 0.75 * r;
            const double d = 0.3;
            x = {r * std::sin(w * t), b * std::sin(2 * w * t), h + d * std::sin(3 * w * t)};
            xd = {r * w * std::cos(w * t), 2 * b * w * std::cos(2 * w * t), 3 * d * w * std::cos(3 * w * t)};
            xdd = {-r * w * w * std::sin(w * t), -4 * b * w * w * std::sin(2 * w * t),
                   -9 * d * w * w * std::sin(3 * w * t)};
            ang = {0.5 * std::sin(w * t), 0.1 * std::sin(2 * w * t), 0.1 * std::cos(3 * w * t)};
            angd = {0.5 * w * std::cos(w * t), 0.2 * w * std::cos(2 * w * t), -0.3 * w * std::sin(3 * w * t)};
            return;
        }
        case TrajectoryKind::Stationary:
            x = {0.0, 0.0, h};
            xd.setZero();
            xdd.setZero();
            ang = {0.3, 0.05, -0.03};
            angd.setZero();
            return;
    }
}

Pose3d Trajectory::pose(double t) const {
    Eigen::Vector3d x, xd, xdd, ang, angd;
    evaluate(t, x, xd, xdd, ang, angd);
    return Pose3d(zyx(ang), x);
}

Eigen::Vector3d Trajectory::velocity(double t) const {
    Eigen::Vector3d x, xd, xdd, ang, angd;
    evaluate(t, x, xd, xdd, ang, angd);
    return zyx(ang).inverse() * xd;
}

ImuInput Trajectory::input(double t) const {
    Eigen::Vector3d x, xd, xdd, ang, angd;
    evaluate(t, x, xd, xdd, ang, angd);
    const double sy = std::sin(ang.y()), cy = std::cos(ang.y());
    const double sz = std::sin(ang.z()), cz = std::cos(ang.z());
    ImuInput u;
    u.t = t;
    // body rates from ZYX angle rates (yaw, pitch, roll)
    u.omega = {angd.z() - angd.x() * sy, angd.y() * cz + angd.x() * cy * sz, -angd.y() * sz + angd.x() * cy * cz};
    u.accel = zyx(ang).inverse() * (xdd + cfg_.gravity * Eigen::Vector3d::UnitZ());
    return u;
}

Scenario generate_scenario(const ScenarioConfig& cfg, double min_depth) {
    cfg.validate();
    const Trajectory traj(cfg);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> u01;

    Scenario s;
    s.camera = cfg.camera;
    s.landmarks.reserve(static_cast<std::size_t>(cfg.landmarks));
    for (int j = 0; j < cfg.landmarks; ++j) {
        const double rad = cfg.shell_min + (cfg.shell_max - cfg.shell_min) * u01(rng);
        s.landmarks.push_back({j, traj.centre() + rad * random_unit(rng)});
    }
    std::vector<double> track_offset(static_cast<std::size_t>(cfg.landmarks), 0.0);
    for (auto& o : track_offset) {
        o = cfg.track_lifetime * u01(rng);
    }

    const double dt = 1.0 / cfg.imu_rate;
    const auto n_imu = static_cast<long>(std::floor(cfg.duration * cfg.imu_rate + 1e-9));
    const double sig_g = cfg.gyro_noise * std::sqrt(cfg.imu_rate);
    const double sig_a = cfg.accel_noise * std::sqrt(cfg.imu_rate);
    const double walk_g = cfg.bias_walk_gyro * std::sqrt(dt);
    const double walk_a = cfg.bias_walk_accel * std::sqrt(dt);
    BiasState bias = cfg.bias;
    for (long k = 0; k <= n_imu; ++k) {
        const double t = static_cast<double>(k) * dt;
        TruthSample ts;
        ts.t = t;
        ts.state.pose = traj.pose(t);
        ts.state.velocity = traj.velocity(t);
        ts.state.landmarks = s.landmarks;
        ts.bias = bias;
        s.truth.push_back(ts);

        ImuInput u = traj.input(t);
        u.omega += bias.b_omega + sig_g * Eigen::Vector3d(n01(rng), n01(rng), n01(rng));
        u.accel += bias.b_accel + sig_a * Eigen::Vector3d(n01(rng), n01(rng), n01(rng));
        s.imu.push_back(u);

        bias.b_omega += walk_g * Eigen::Vector3d(n01(rng), n01(rng), n01(rng));
        bias.b_accel += walk_a * Eigen::Vector3d(n01(rng), n01(rng), n01(rng));
    }

    const double sigma_b = cfg.bearing_noise_deg * M_PI / 180.0;
    const double cos_half_fov = std::cos(0.5 * cfg.fov_deg * M_PI / 180.0);
    const auto n_cam = static_cast<long>(std::floor(cfg.duration * cfg.camera_rate + 1e-9));
    for (long k = 0; k <= n_cam; ++k) {
        const double t = static_cast<double>(k) / cfg.camera_rate;
        const Pose3d camera_inv = (traj.pose(t) * cfg.camera.body_from_camera).inverse();
        MeasurementBatch batch;
        batch.t = t;
        for (std::size_t j = 0; j < s.landmarks.size(); ++j) {
            const Eigen::Vector3d q = camera_inv * s.landmarks[j].p;
            if (!(q.norm() > min_depth)) {
                throw ExceptionSetError(s.landmarks[j].id, "generate_scenario: landmark " +
                                                               std::to_string(s.landmarks[j].id) +
                                                               " enters the exception set");
            }
            const Eigen::Vector3d y = q.normalized();
            if (cfg.fov_deg > 0.0 && y.z() < cos_half_fov) {
                continue;
            }
            int id = s.landmarks[j].id;
            if (cfg.track_lifetime > 0.0) {
                const auto epoch = static_cast<int>(std::floor((t + track_offset[j]) / cfg.track_lifetime));
                id += epoch * cfg.landmarks;
            }
            batch.bearings.push_back({id, perturb_bearing(y, sigma_b, rng)});
        }
        s.frames.push_back(std::move(batch));
    }
    return s;
}

GainConfig scenario_gains(const ScenarioConfig& cfg, const Scenario& s) {
    GainConfig g;
    g.gravity = cfg.gravity;
    g.input_gyro = std::max(cfg.gyro_noise * cfg.gyro_noise, 1e-8);
    g.input_accel = std::max(cfg.accel_noise * cfg.accel_noise, 1e-6);
    // the stereographic chart halves small angles
    const double sb = 0.5 * cfg.bearing_noise_deg * M_PI / 180.0;
    g.bearing = std::max(sb * sb, 1e-8);
    g.process_bias = std::max(
        {cfg.bias_walk_gyro * cfg.bias_walk_gyro, cfg.bias_walk_accel * cfg.bias_walk_accel, 1e-8});
    if (!s.truth.empty()) {
        g.init_pose = s.truth.front().state.pose;
        g.init_velocity = s.truth.front().state.velocity;
        // scene-depth prior: median true depth of the first frame
        std::vector<double> depth;
        const Pose3d cam_inv = (s.truth.front().state.pose * s.camera.body_from_camera).inverse();
        if (!s.frames.empty()) {
            for (const auto& m : s.frames.front().bearings) {
                const int j = m.id % cfg.landmarks;
                depth.push_back((cam_inv * s.landmarks[static_cast<std::size_t>(j)].p).norm());
            }
        }
        if (!depth.empty()) {
            auto mid = depth.begin() + static_cast<std::ptrdiff_t>(depth.size() / 2);
            std::nth_element(depth.begin(), mid, depth.end());
            g.landmark_depth = *mid;
        }
    }
    return g;
}

}  // namespace eqfvio
