#include "eqfvio/eqf.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "eqfvio/charts.hpp"
#include "eqfvio/sphere.hpp"

namespace eqfvio {

// ---------------------------------------------------------------------------
// gains

GainConfig GainConfig::from_key_values(const KeyValues& kv) {
    static const std::set<std::string> known = {
        "sigma0_bias", "sigma0_gravity", "sigma0_velocity", "sigma0_landmark", "input_gyro", "input_accel",
        "bearing",     "process",        "process_bias",    "landmark_depth",  "depth_median_min",
        "gravity",     "min_depth",      "max_step",        "gap",             "propagation",
        "init_px",     "init_py",        "init_pz",         "init_qw",         "init_qx",
        "init_qy",     "init_qz",        "init_vx",         "init_vy",         "init_vz",
        "init_bwx",    "init_bwy",       "init_bwz",        "init_bax",        "init_bay",
        "init_baz"};
    for (const auto& [key, value] : kv) {
        if (known.count(key) == 0) {
            throw std::invalid_argument("gains: unknown key " + key);
        }
    }
    GainConfig g;
    g.sigma0_bias = get_double(kv, "sigma0_bias", g.sigma0_bias);
    g.sigma0_gravity = get_double(kv, "sigma0_gravity", g.sigma0_gravity);
    g.sigma0_velocity = get_double(kv, "sigma0_velocity", g.sigma0_velocity);
    g.sigma0_landmark = get_double(kv, "sigma0_landmark", g.sigma0_landmark);
    g.input_gyro = get_double(kv, "input_gyro", g.input_gyro);
    g.input_accel = get_double(kv, "input_accel", g.input_accel);
    g.bearing = get_double(kv, "bearing", g.bearing);
    g.process = get_double(kv, "process", g.process);
    g.process_bias = get_double(kv, "process_bias", g.process_bias);
    g.landmark_depth = get_double(kv, "landmark_depth", g.landmark_depth);
    g.depth_median_min = get_int(kv, "depth_median_min", g.depth_median_min);
    g.gravity = get_double(kv, "gravity", g.gravity);
    g.min_depth = get_double(kv, "min_depth", g.min_depth);
    g.max_step = get_double(kv, "max_step", g.max_step);
    g.gap = get_double(kv, "gap", g.gap);

    const std::string scheme = get_string(kv, "propagation", "lift");
    if (scheme == "lift") {
        g.scheme = PropagationScheme::Lift;
    } else if (scheme == "exact") {
        g.scheme = PropagationScheme::Exact;
    } else {
        throw std::invalid_argument("gains: propagation must be lift or exact, got " + scheme);
    }

    for (const char* k : {"sigma0_bias", "sigma0_gravity", "sigma0_velocity", "sigma0_landmark", "input_gyro",
                          "input_accel", "bearing", "process", "process_bias", "landmark_depth", "max_step", "gap"}) {
        if (!(get_double(kv, k, 1.0) > 0.0)) {
            throw std::invalid_argument(std::string("gains: ") + k + " must be positive");
        }
    }

    if (kv.count("init_px") || kv.count("init_qw")) {
        const Eigen::Vector3d x(get_double(kv, "init_px", 0.0), get_double(kv, "init_py", 0.0),
                                get_double(kv, "init_pz", 0.0));
        const Eigen::Quaterniond q(get_double(kv, "init_qw", 1.0), get_double(kv, "init_qx", 0.0),
                                   get_double(kv, "init_qy", 0.0), get_double(kv, "init_qz", 0.0));
        if (q.norm() < 1e-9) {
            throw std::invalid_argument("gains: init quaternion has zero norm");
        }
        g.init_pose = Pose3d(Rot3d(q), x);
    }
    if (kv.count("init_vx") || kv.count("init_vy") || kv.count("init_vz")) {
        g.init_velocity = Eigen::Vector3d(get_double(kv, "init_vx", 0.0), get_double(kv, "init_vy", 0.0),
                                          get_double(kv, "init_vz", 0.0));
    }
    g.init_bias.b_omega = {get_double(kv, "init_bwx", 0.0), get_double(kv, "init_bwy", 0.0),
                           get_double(kv, "init_bwz", 0.0)};
    g.init_bias.b_accel = {get_double(kv, "init_bax", 0.0), get_double(kv, "init_bay", 0.0),
                           get_double(kv, "init_baz", 0.0)};
    return g;
}

GainConfig GainConfig::load(const std::string& path) { return from_key_values(read_key_values(path)); }

std::string GainConfig::to_text() const {
    std::ostringstream out;
    char buf[64];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << key << " = " << buf << "\n";
    };
    put("sigma0_bias", sigma0_bias);
    put("sigma0_gravity", sigma0_gravity);
    put("sigma0_velocity", sigma0_velocity);
    put("sigma0_landmark", sigma0_landmark);
    put("input_gyro", input_gyro);
    put("input_accel", input_accel);
    put("bearing", bearing);
    put("process", process);
    put("process_bias", process_bias);
    put("landmark_depth", landmark_depth);
    out << "depth_median_min = " << depth_median_min << "\n";
    put("gravity", gravity);
    put("min_depth", min_depth);
    put("max_step", max_step);
    put("gap", gap);
    out << "propagation = " << (scheme == PropagationScheme::Exact ? "exact" : "lift") << "\n";
    if (init_pose) {
        const Eigen::Quaterniond& q = init_pose->rotation().quaternion();
        const Eigen::Vector3d& x = init_pose->translation();
        put("init_px", x.x());
        put("init_py", x.y());
        put("init_pz", x.z());
        put("init_qw", q.w());
        put("init_qx", q.x());
        put("init_qy", q.y());
        put("init_qz", q.z());
    }
    if (init_velocity) {
        put("init_vx", init_velocity->x());
        put("init_vy", init_velocity->y());
        put("init_vz", init_velocity->z());
    }
    put("init_bwx", init_bias.b_omega.x());
    put("init_bwy", init_bias.b_omega.y());
    put("init_bwz", init_bias.b_omega.z());
    put("init_bax", init_bias.b_accel.x());
    put("init_bay", init_bias.b_accel.y());
    put("init_baz", init_bias.b_accel.z());
    return out.str();
}

Eigen::MatrixXd GainConfig::initial_covariance(std::size_t n) const {
    Eigen::VectorXd d(riccati_dim(n));
    d.head<6>().setConstant(sigma0_bias);
    d.segment<2>(kGravityOffset).setConstant(sigma0_gravity);
    d.segment<3>(kVelocityOffset).setConstant(sigma0_velocity);
    d.tail(3 * static_cast<Eigen::Index>(n)).setConstant(sigma0_landmark);
    return d.asDiagonal();
}

Eigen::MatrixXd GainConfig::process_noise(std::size_t n) const {
    Eigen::VectorXd d = Eigen::VectorXd::Constant(riccati_dim(n), process);
    d.head<6>().setConstant(process_bias);
    return d.asDiagonal();
}

Eigen::Matrix<double, 6, 6> GainConfig::input_noise() const {
    Eigen::Matrix<double, 6, 1> d;
    d << Eigen::Vector3d::Constant(input_gyro), Eigen::Vector3d::Constant(input_accel);
    return d.asDiagonal();
}

// ---------------------------------------------------------------------------
// state

int FilterState::slot(int id) const {
    for (std::size_t i = 0; i < origin.landmarks.size(); ++i) {
        if (origin.landmarks[i].id == id) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

FilterState make_filter(const Pose3d& origin_pose, const Eigen::Vector3d& origin_velocity, const BiasState& bias,
                        const GainConfig& cfg) {
    FilterState fs;
    fs.origin.pose = origin_pose;
    fs.origin.velocity = origin_velocity;
    fs.X = SymElement::identity({});
    fs.bias = bias;
    fs.Sigma = cfg.initial_covariance(0);
    fs.C0 = Eigen::MatrixXd::Zero(0, chart_dim(0));
    return fs;
}

TotalState estimated_state(const FilterState& fs, const CameraExtrinsics& cam) {
    return sym_act_total(fs.X, fs.origin, cam, 0.0);
}

// ---------------------------------------------------------------------------
// linearisation

Eigen::MatrixXd compute_state_matrix(const FilterState& fs, const ImuInput& u, const CameraExtrinsics& cam,
                                     double gravity) {
    const std::size_t n = fs.size();
    const TotalState xi = estimated_state(fs, cam);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(chart_dim(n), chart_dim(n));

    const Eigen::Vector3d eta0 = body_gravity_direction(fs.origin.pose);
    A.block<3, 2>(2, 0) = -gravity * stereo_chart_inv_jacobian(eta0, Eigen::Vector2d::Zero());

    const Eigen::Matrix3d RaT = fs.X.A().rotation().matrix().transpose();
    const Eigen::Matrix3d RcT = cam.body_from_camera.rotation().matrix().transpose();
    const Eigen::Vector3d vc = adjoint_inverse(cam.body_from_camera, Se3Tangentd{u.omega, xi.velocity}).linear;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index r = 5 + 3 * static_cast<Eigen::Index>(i);
        const ScaledRotd& Q = fs.X.landmarks[i].Q;
        const Eigen::Matrix3d Qm = Q.matrix();
        const Eigen::Vector3d q = camera_point(xi, xi.landmarks[i], cam);
        const double q2 = q.squaredNorm();
        if (!(q2 > 0.0)) {
            throw ExceptionSetError(xi.landmarks[i].id, "compute_state_matrix: landmark at the camera centre");
        }
        A.block<3, 3>(r, 2) = -Qm * RcT * RaT;
        A.block<3, 3>(r, r) = -(Qm * (skew(q) * skew(vc) - 2.0 * vc * q.transpose() + q * vc.transpose()) *
                                Q.inverse().matrix()) /
                              q2;
    }
    return A;
}

Eigen::MatrixXd compute_input_matrix(const FilterState& fs, const ImuInput& /*u*/, const CameraExtrinsics& cam) {
    const std::size_t n = fs.size();
    const TotalState xi = estimated_state(fs, cam);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(chart_dim(n), 6);

    const Eigen::Vector3d eta0 = body_gravity_direction(fs.origin.pose);
    const Eigen::Matrix3d Ra = fs.X.A().rotation().matrix();
    // reduces to R_A (R_A^T e3)^x when the origin is level
    B.block<2, 3>(0, 0) = stereo_chart_jacobian(eta0, eta0) * skew(eta0) * Ra;
    B.block<3, 3>(2, 0) = Ra * skew(xi.velocity);
    B.block<3, 3>(2, 3) = Ra;

    const Eigen::Matrix3d RcT = cam.body_from_camera.rotation().matrix().transpose();
    const Eigen::Matrix3d xc = skew(cam.body_from_camera.translation());
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d q = camera_point(xi, xi.landmarks[i], cam);
        B.block<3, 3>(5 + 3 * static_cast<Eigen::Index>(i), 0) =
            fs.X.landmarks[i].Q.matrix() * (skew(q) * RcT + RcT * xc);
    }
    return B;
}

Eigen::MatrixXd compute_output_matrix(const TotalState& origin, const CameraExtrinsics& cam) {
    const std::size_t n = origin.landmarks.size();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * static_cast<Eigen::Index>(n), chart_dim(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d q0 = camera_point(origin, origin.landmarks[i], cam);
        const double r = q0.norm();
        if (!(r > 0.0)) {
            throw ExceptionSetError(origin.landmarks[i].id, "compute_output_matrix: origin landmark at the camera");
        }
        const Eigen::Vector3d y0 = q0 / r;
        C.block<2, 3>(2 * static_cast<Eigen::Index>(i), 5 + 3 * static_cast<Eigen::Index>(i)) =
            stereo_chart_jacobian(y0, y0) * (Eigen::Matrix3d::Identity() - y0 * y0.transpose()) / r;
    }
    return C;
}

// ---------------------------------------------------------------------------
// propagation

void propagate_covariance(Eigen::MatrixXd& Sigma, const Eigen::MatrixXd& A0, const Eigen::MatrixXd& B,
                          const Eigen::Matrix<double, 6, 6>& R, const Eigen::MatrixXd& P, double dt) {
    const Eigen::Index m = A0.rows();
    const Eigen::Index N = kBiasDim + m;
    // (I + dt Abar) Sigma (I + dt Abar)^T matches the Euler step to first order and cannot lose definiteness
    Eigen::MatrixXd F = Eigen::MatrixXd::Identity(N, N);
    F.block(kBiasDim, 0, m, kBiasDim) = -dt * B;
    F.block(kBiasDim, kBiasDim, m, m) += dt * A0;
    const Eigen::SparseMatrix<double> Fs = F.sparseView();
    const Eigen::MatrixXd FS = Fs * Sigma;
    Sigma = (Fs * FS.transpose()).transpose();
    Sigma += dt * P;
    Sigma.bottomRightCorner(m, m) += dt * (B * R * B.transpose());
    Sigma = 0.5 * (Sigma + Sigma.transpose()).eval();
}

std::vector<int> propagate(FilterState& fs, const ImuInput& u_measured, double dt, const GainConfig& cfg,
                           const CameraExtrinsics& cam) {
    std::vector<int> dropped;
    if (!(dt > 0.0)) {
        return dropped;
    }
    if (dt > cfg.max_step * (1.0 + 1e-9)) {
        throw std::invalid_argument("propagate: dt " + std::to_string(dt) + " exceeds max_step");
    }
    const ImuInput u = apply_bias_correction(u_measured, fs.bias);
    for (;;) {
        try {
            const TotalState xi = estimated_state(fs, cam);
            const AlgebraElement L = lift(xi, u, cam, cfg.gravity, cfg.min_depth);
            const Eigen::MatrixXd A0 = compute_state_matrix(fs, u, cam, cfg.gravity);
            const Eigen::MatrixXd B = compute_input_matrix(fs, u, cam);
            propagate_covariance(fs.Sigma, A0, B, cfg.input_noise(), cfg.process_noise(fs.size()), dt);
            if (cfg.scheme == PropagationScheme::Lift) {
                fs.X = fs.X * exp(L * dt);
            } else {
                const TotalState next = flow_constant_input(xi, u, dt, cfg.gravity);
                fs.X = fs.X * solve_transitive(xi, next, cam);
            }
            return dropped;
        } catch (const ExceptionSetError& e) {
            if (fs.slot(e.landmark_id()) < 0) {
                throw;
            }
            remove_landmark(fs, e.landmark_id());
            fs.quarantined.insert(e.landmark_id());
            dropped.push_back(e.landmark_id());
        }
    }
}

// ---------------------------------------------------------------------------
// bundle lift

namespace {

// Sigma^{-1} restricted to the landmark block.
Eigen::MatrixXd landmark_information(const Eigen::MatrixXd& Sigma, std::size_t n) {
    const Eigen::Index k = 3 * static_cast<Eigen::Index>(n);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(Sigma.rows(), k);
    D.bottomRows(k).setIdentity();
    const Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("bundle_lift: covariance is not positive-definite");
    }
    return llt.solve(D).bottomRows(k);
}

// Estimated landmark motion caused by gamma_prime, in origin camera-frame chart coordinates.
Eigen::VectorXd landmark_motion(const FilterState& fs, const Eigen::VectorXd& gp, const CameraExtrinsics& cam,
                                bool include_chart_term) {
    const std::size_t n = fs.size();
    const TotalState xi = estimated_state(fs, cam);
    const Pose3d P0_inv = fs.origin.pose.inverse();
    const Eigen::Matrix3d RcT = cam.body_from_camera.rotation().matrix().transpose();
    const Eigen::Matrix3d RaT = fs.X.A().rotation().matrix().transpose();
    const Eigen::Matrix3d RpT = fs.origin.pose.rotation().matrix().transpose();
    const Eigen::Vector3d w = gp.segment<3>(0);
    const Eigen::Vector3d nu = gp.segment<3>(3);
    Eigen::VectorXd r(3 * static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index k = 3 * static_cast<Eigen::Index>(i);
        const Eigen::Vector3d z = P0_inv * xi.landmarks[i].p;
        r.segment<3>(k) = fs.X.landmarks[i].Q.matrix() * RcT * RaT * (w.cross(z) + nu);
        if (include_chart_term) {
            const Eigen::Vector3d m = P0_inv * fs.origin.landmarks[i].p;
            r.segment<3>(k) += RcT * (m.cross(w) - nu + RpT * gp.segment<3>(9 + k));
        }
    }
    return r;
}

}  // namespace

double bundle_cost(const FilterState& fs, const Eigen::VectorXd& gamma_prime, const CameraExtrinsics& cam) {
    if (fs.size() == 0) {
        return 0.0;
    }
    const Eigen::VectorXd r = landmark_motion(fs, gamma_prime, cam, true);
    return r.dot(landmark_information(fs.Sigma, fs.size()) * r);
}

BundleLift bundle_lift(const FilterState& fs, const Eigen::VectorXd& Gamma, const CameraExtrinsics& cam) {
    const std::size_t n = fs.size();
    if (Gamma.size() != chart_dim(n)) {
        throw std::invalid_argument("bundle_lift: Gamma has the wrong dimension");
    }
    const TotalState& origin = fs.origin;
    const Eigen::Vector3d eta0 = body_gravity_direction(origin.pose);
    const Eigen::Matrix3d Rp = origin.pose.rotation().matrix();
    const Eigen::Matrix3d Rc = cam.body_from_camera.rotation().matrix();
    const Pose3d P0_inv = origin.pose.inverse();

    // particular solution: rotation about an axis orthogonal to eta0, no translation
    Eigen::VectorXd gp = Eigen::VectorXd::Zero(total_tangent_dim(n));
    const Eigen::Vector3d t = stereo_chart_inv_jacobian(eta0, Eigen::Vector2d::Zero()) * Gamma.head<2>();
    const Eigen::Vector3d w = -eta0.cross(t);
    gp.segment<3>(0) = w;
    gp.segment<3>(6) = Gamma.segment<3>(2);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index k = 3 * static_cast<Eigen::Index>(i);
        const Eigen::Vector3d m = P0_inv * origin.landmarks[i].p;
        gp.segment<3>(9 + k) = Rp * (Rc * Gamma.segment<3>(5 + k) + w.cross(m));
    }

    if (n > 0) {
        const Eigen::MatrixXd K = gauge_directions(origin);
        const Eigen::MatrixXd W = landmark_information(fs.Sigma, n);
        const Eigen::VectorXd r0 = landmark_motion(fs, gp, cam, true);
        Eigen::MatrixXd G(r0.size(), 4);
        for (int j = 0; j < 4; ++j) {
            // gauge directions are in the chart kernel, so only the motion term survives
            G.col(j) = landmark_motion(fs, K.col(j), cam, false);
        }
        const Eigen::Matrix4d H = G.transpose() * W * G;
        const Eigen::Vector4d b = G.transpose() * (W * r0);
        const Eigen::JacobiSVD<Eigen::Matrix4d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::Vector4d sv = svd.singularValues();
        Eigen::Vector4d inv = Eigen::Vector4d::Zero();
        for (int j = 0; j < 4; ++j) {
            if (sv(j) > 1e-10 * std::max(1.0, sv(0))) {
                inv(j) = 1.0 / sv(j);
            }
        }
        const Eigen::Vector4d s = -(svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * b);
        gp += K * s;
    }

    BundleLift out;
    out.gamma_prime = gp;
    out.delta = action_right_inverse(origin, TotalTangent::from_vector(gp, origin.ids()), cam);
    return out;
}

// ---------------------------------------------------------------------------
// correction

Correction compute_correction(const FilterState& fs, const MeasurementBatch& z, const GainConfig& cfg,
                              const CameraExtrinsics& cam) {
    const std::size_t n = fs.size();
    const Eigen::Index N = riccati_dim(n);
    Correction c;
    c.Gamma = Eigen::VectorXd::Zero(chart_dim(n));
    c.Sigma = fs.Sigma;

    std::vector<int> slots;
    std::vector<Eigen::Vector2d> res;
    for (const auto& meas : z.bearings) {
        const int k = fs.slot(meas.id);
        if (k < 0 || !fs.origin_bearings[static_cast<std::size_t>(k)].valid || !(meas.bearing.norm() > 0.0)) {
            c.dropped_ids.push_back(meas.id);
            continue;
        }
        const Eigen::Vector3d y = fs.X.landmarks[static_cast<std::size_t>(k)].Q.rotation() * meas.bearing.normalized();
        try {
            res.push_back(stereo_chart(fs.origin_bearings[static_cast<std::size_t>(k)].y, y));
        } catch (const ChartDomainError&) {
            c.dropped_ids.push_back(meas.id);
            continue;
        }
        slots.push_back(k);
        c.used_ids.push_back(meas.id);
    }

    const Eigen::Index m = static_cast<Eigen::Index>(slots.size());
    if (m == 0) {
        c.residual.resize(0);
        c.lift.gamma_prime = Eigen::VectorXd::Zero(total_tangent_dim(n));
        c.lift.delta = AlgebraElement::from_vector(Eigen::VectorXd::Zero(algebra_dim(n)), fs.ids());
        return c;
    }

    c.residual.resize(2 * m);
    Eigen::MatrixXd CS(2 * m, N);
    std::vector<Eigen::Matrix<double, 2, 3>> Cb(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index k = slots[static_cast<std::size_t>(j)];
        c.residual.segment<2>(2 * j) = res[static_cast<std::size_t>(j)];
        Cb[static_cast<std::size_t>(j)] = fs.C0.block<2, 3>(2 * k, 5 + 3 * k);
        CS.middleRows<2>(2 * j) = Cb[static_cast<std::size_t>(j)] * fs.Sigma.middleRows<3>(kLandmarkOffset + 3 * k);
    }
    Eigen::MatrixXd S(2 * m, 2 * m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index k = slots[static_cast<std::size_t>(j)];
        S.middleCols<2>(2 * j) =
            CS.middleCols<3>(kLandmarkOffset + 3 * k) * Cb[static_cast<std::size_t>(j)].transpose();
    }
    S = 0.5 * (S + S.transpose()).eval();
    S.diagonal().array() += cfg.bearing;

    const Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("update: innovation covariance is not positive-definite");
    }
    const Eigen::MatrixXd Kt = llt.solve(CS);  // K^T
    const Eigen::VectorXd x = Kt.transpose() * c.residual;
    c.beta = x.head<6>();
    c.Gamma = x.tail(N - kBiasDim);

    // Joseph form, expanded so that only N x 2m products appear
    const Eigen::MatrixXd KCS = Kt.transpose() * CS;
    c.Sigma = fs.Sigma - KCS - KCS.transpose() + Kt.transpose() * (S * Kt);
    c.Sigma = 0.5 * (c.Sigma + c.Sigma.transpose()).eval();

    c.lift = bundle_lift(fs, c.Gamma, cam);
    return c;
}

void apply_correction(FilterState& fs, const Correction& c) {
    fs.bias = BiasState::from_vector(fs.bias.vector() + c.beta);
    fs.X = exp(c.lift.delta) * fs.X;
    fs.Sigma = c.Sigma;
}

Correction update(FilterState& fs, const MeasurementBatch& z, const GainConfig& cfg, const CameraExtrinsics& cam) {
    Correction c = compute_correction(fs, z, cfg, cam);
    apply_correction(fs, c);
    return c;
}

// ---------------------------------------------------------------------------
// landmark registry

double nominal_depth(const FilterState& fs, const GainConfig& cfg, const CameraExtrinsics& cam) {
    const std::size_t n = fs.size();
    if (static_cast<int>(n) < cfg.depth_median_min || n == 0) {
        return cfg.landmark_depth;
    }
    const TotalState xi = estimated_state(fs, cam);
    std::vector<double> depth;
    depth.reserve(n);
    for (const auto& lm : xi.landmarks) {
        depth.push_back(camera_point(xi, lm, cam).norm());
    }
    auto mid = depth.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(depth.begin(), mid, depth.end());
    double med = *mid;
    if (n % 2 == 0) {
        med = 0.5 * (med + *std::max_element(depth.begin(), mid));
    }
    return med;
}

void add_landmark(FilterState& fs, int id, const Eigen::Vector3d& bearing, const GainConfig& cfg,
                  const CameraExtrinsics& cam) {
    if (fs.slot(id) >= 0) {
        throw std::invalid_argument("add_landmark: id " + std::to_string(id) + " already registered");
    }
    if (!(bearing.norm() > 0.0)) {
        throw std::invalid_argument("add_landmark: zero bearing");
    }
    const Eigen::Vector3d b = bearing.normalized();
    const double d0 = nominal_depth(fs, cfg, cam);
    // the new transform is the identity, so the origin point carries the camera-frame estimate
    fs.origin.landmarks.push_back({id, fs.origin.pose * (cam.body_from_camera * (d0 * b))});
    fs.origin_bearings.push_back({id, b, true});
    fs.X.landmarks.push_back({id, ScaledRotd::identity()});

    const Eigen::Index N = fs.Sigma.rows();
    fs.Sigma.conservativeResize(N + 3, N + 3);
    fs.Sigma.rightCols<3>().setZero();
    fs.Sigma.bottomRows<3>().setZero();
    fs.Sigma.bottomRightCorner<3, 3>().diagonal().setConstant(cfg.sigma0_landmark);

    const Eigen::Index r = fs.C0.rows();
    const Eigen::Index c = fs.C0.cols();
    fs.C0.conservativeResize(r + 2, c + 3);
    fs.C0.rightCols<3>().setZero();
    fs.C0.bottomRows<2>().setZero();
    fs.C0.bottomRightCorner<2, 3>() = stereo_chart_jacobian(b, b) * (Eigen::Matrix3d::Identity() - b * b.transpose()) / d0;
}

void remove_landmark(FilterState& fs, int id) {
    const int k = fs.slot(id);
    if (k < 0) {
        throw std::invalid_argument("remove_landmark: id " + std::to_string(id) + " is not registered");
    }
    fs.origin.landmarks.erase(fs.origin.landmarks.begin() + k);
    fs.origin_bearings.erase(fs.origin_bearings.begin() + k);
    fs.X.landmarks.erase(fs.X.landmarks.begin() + k);

    auto keep_except = [](Eigen::Index size, Eigen::Index first, Eigen::Index count) {
        std::vector<Eigen::Index> keep;
        keep.reserve(static_cast<std::size_t>(size - count));
        for (Eigen::Index i = 0; i < size; ++i) {
            if (i < first || i >= first + count) {
                keep.push_back(i);
            }
        }
        return keep;
    };
    const auto ks = keep_except(fs.Sigma.rows(), kLandmarkOffset + 3 * k, 3);
    fs.Sigma = fs.Sigma(ks, ks).eval();
    const auto kr = keep_except(fs.C0.rows(), 2 * k, 2);
    const auto kc = keep_except(fs.C0.cols(), 5 + 3 * k, 3);
    fs.C0 = fs.C0(kr, kc).eval();
}

}  // namespace eqfvio
