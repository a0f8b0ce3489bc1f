#pragma once

#include "eqfvio/lie/so3.hpp"

namespace eqfvio {

template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

/// Element U(Omega, v) of se(3), with P' = P U meaning R' = R Omega^x and x' = R v.
template <typename Scalar>
struct Se3Tangent {
    Vector3<Scalar> angular = Vector3<Scalar>::Zero();
    Vector3<Scalar> linear = Vector3<Scalar>::Zero();

    static Se3Tangent from_vector(const Vector6<Scalar>& v) {
        return {v.template head<3>(), v.template tail<3>()};
    }

    Vector6<Scalar> vector() const {
        Vector6<Scalar> v;
        v << angular, linear;
        return v;
    }

    /// 4x4 homogeneous form.
    Matrix4<Scalar> hat() const {
        Matrix4<Scalar> m = Matrix4<Scalar>::Zero();
        m.template topLeftCorner<3, 3>() = skew(angular);
        m.template topRightCorner<3, 1>() = linear;
        return m;
    }

    static Se3Tangent vee(const Matrix4<Scalar>& m) {
        return {eqfvio::vee(m.template topLeftCorner<3, 3>()), m.template topRightCorner<3, 1>()};
    }

    Se3Tangent operator+(const Se3Tangent& o) const { return {angular + o.angular, linear + o.linear}; }
    Se3Tangent operator-(const Se3Tangent& o) const { return {angular - o.angular, linear - o.linear}; }
    Se3Tangent operator*(Scalar s) const { return {s * angular, s * linear}; }
};

/// Rigid body transform P = (R_P, x_P) acting on points by P(q) = R_P q + x_P.
template <typename Scalar_>
class Pose {
public:
    using Scalar = Scalar_;
    using Vector = Vector3<Scalar>;
    using Tangent = Se3Tangent<Scalar>;

    Pose() : translation_(Vector::Zero()) {}
    Pose(const Rot3<Scalar>& rotation, const Vector& translation)
        : rotation_(rotation), translation_(translation) {}

    static Pose identity() { return Pose(); }

    static Pose from_matrix(const Matrix4<Scalar>& m) {
        return Pose(Rot3<Scalar>::from_matrix(m.template topLeftCorner<3, 3>()), m.template topRightCorner<3, 1>());
    }

    static Pose exp(const Tangent& u) {
        return Pose(Rot3<Scalar>::exp(u.angular), so3_left_jacobian(u.angular) * u.linear);
    }

    Tangent log() const {
        const Vector w = rotation_.log();
        return {w, so3_left_jacobian_inverse(w) * translation_};
    }

    Pose inverse() const {
        const Rot3<Scalar> r_inv = rotation_.inverse();
        return Pose(r_inv, -(r_inv * translation_));
    }

    Pose operator*(const Pose& o) const {
        return Pose(rotation_ * o.rotation_, translation_ + rotation_ * o.translation_);
    }

    Vector operator*(const Vector& p) const { return rotation_ * p + translation_; }

    /// Ad_P (Omega, v) = (R Omega, R v + x × R Omega).
    Tangent adjoint(const Tangent& u) const {
        const Vector rw = rotation_ * u.angular;
        return {rw, rotation_ * u.linear + translation_.cross(rw)};
    }

    Matrix6<Scalar> adjoint_matrix() const {
        const Matrix3<Scalar> R = rotation_.matrix();
        Matrix6<Scalar> ad = Matrix6<Scalar>::Zero();
        ad.template topLeftCorner<3, 3>() = R;
        ad.template bottomRightCorner<3, 3>() = R;
        ad.template bottomLeftCorner<3, 3>() = skew(translation_) * R;
        return ad;
    }

    Matrix4<Scalar> matrix() const {
        Matrix4<Scalar> m = Matrix4<Scalar>::Identity();
        m.template topLeftCorner<3, 3>() = rotation_.matrix();
        m.template topRightCorner<3, 1>() = translation_;
        return m;
    }

    const Rot3<Scalar>& rotation() const { return rotation_; }
    const Vector& translation() const { return translation_; }

private:
    Rot3<Scalar> rotation_;
    Vector translation_;
};

using Pose3d = Pose<double>;
using Se3Tangentd = Se3Tangent<double>;

/// Adjoint of the inverse transform, Ad_P^{-1}.
template <typename Scalar>
Se3Tangent<Scalar> adjoint_inverse(const Pose<Scalar>& P, const Se3Tangent<Scalar>& u) {
    return P.inverse().adjoint(u);
}

}  // namespace eqfvio
