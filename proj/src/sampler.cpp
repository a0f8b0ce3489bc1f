#include "eqfvio/sampler.hpp"

#include "eqfvio/charts.hpp"

namespace eqfvio {

Eigen::VectorXd Sampler::vector(Eigen::Index n, double scale) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = scale * normal();
    }
    return v;
}

Eigen::Vector3d Sampler::unit3() {
    Eigen::Vector3d v;
    do {
        v = vector3();
    } while (v.norm() < 1e-6);
    return v.normalized();
}

Rot3d Sampler::rotation() {
    Eigen::Vector4d q;
    do {
        q = {normal(), normal(), normal(), normal()};
    } while (q.norm() < 1e-6);
    return Rot3d(Eigen::Quaterniond(q(0), q(1), q(2), q(3)));
}

Pose3d Sampler::pose(double translation_scale) { return Pose3d(rotation(), vector3(translation_scale)); }

ExtPosed Sampler::ext_pose() { return ExtPosed(pose(), vector3()); }

ScaledRotd Sampler::scaled_rotation(double log_scale_range) {
    return ScaledRotd(rotation(), std::exp(uniform(-log_scale_range, log_scale_range)));
}

GaugeElementd Sampler::gauge() { return GaugeElementd(uniform(-M_PI, M_PI), vector3(2.0)); }

CameraExtrinsics Sampler::extrinsics() {
    CameraExtrinsics cam;
    cam.body_from_camera = Pose3d(rotation(), vector3(0.1));
    return cam;
}

ImuInput Sampler::input() {
    ImuInput u;
    u.omega = vector3(0.5);
    u.accel = vector3(2.0) + Eigen::Vector3d(0.0, 0.0, kDefaultGravity);
    return u;
}

TotalState Sampler::state(std::size_t n, const CameraExtrinsics& cam, double min_depth, double max_depth) {
    TotalState xi;
    xi.pose = pose(2.0);
    xi.velocity = vector3();
    const Pose3d camera = xi.pose * cam.body_from_camera;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d q = uniform(min_depth, max_depth) * unit3();
        xi.landmarks.push_back({static_cast<int>(3 * i + 1), camera * q});
    }
    return xi;
}

SymElement Sampler::sym_element(const std::vector<int>& ids) {
    SymElement X;
    X.ext = ext_pose();
    for (int id : ids) {
        X.landmarks.push_back({id, scaled_rotation()});
    }
    return X;
}

Eigen::MatrixXd Sampler::spd(Eigen::Index dim, double scale, double floor) {
    Eigen::MatrixXd A(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            A(i, j) = scale * normal();
        }
    }
    Eigen::MatrixXd S = A * A.transpose();
    S.diagonal().array() += floor;
    return 0.5 * (S + S.transpose());
}

FilterState Sampler::filter_state(std::size_t n, const CameraExtrinsics& cam) {
    FilterState fs;
    fs.origin = state(n, cam);
    fs.origin_bearings = measure(fs.origin, cam);
    fs.X = sym_element(fs.origin.ids());
    fs.bias.b_omega = vector3(0.01);
    fs.bias.b_accel = vector3(0.05);
    fs.Sigma = spd(riccati_dim(n));
    fs.C0 = compute_output_matrix(fs.origin, cam);
    return fs;
}

}  // namespace eqfvio
