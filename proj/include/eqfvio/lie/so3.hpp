#pragma once

#include <atomic>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace eqfvio {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// Below this rotation angle the exp/log series replace the closed forms.
inline constexpr double kSmallAngle = 1e-6;

/// Number of compositions a rotation may accumulate before it is projected
/// back onto the unit quaternions. 1 renormalises after every product.
inline std::atomic<int>& rotation_renormalisation_interval() {
    static std::atomic<int> interval{1};
    return interval;
}

template <typename Derived>
Matrix3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& w) {
    using Scalar = typename Derived::Scalar;
    Matrix3<Scalar> m;
    m << Scalar(0), -w(2), w(1),
         w(2), Scalar(0), -w(0),
         -w(1), w(0), Scalar(0);
    return m;
}

template <typename Derived>
Vector3<typename Derived::Scalar> vee(const Eigen::MatrixBase<Derived>& m) {
    return Vector3<typename Derived::Scalar>(m(2, 1), m(0, 2), m(1, 0));
}

/// Left Jacobian of SO(3): sum_k phi^k / (k+1)!, i.e. int_0^1 exp(s phi^x) ds.
template <typename Derived>
Matrix3<typename Derived::Scalar> so3_left_jacobian(const Eigen::MatrixBase<Derived>& phi) {
    using Scalar = typename Derived::Scalar;
    const Scalar theta = phi.norm();
    const Matrix3<Scalar> K = skew(phi);
    const Matrix3<Scalar> I = Matrix3<Scalar>::Identity();
    if (theta < Scalar(kSmallAngle)) {
        return I + K / Scalar(2) + K * K / Scalar(6);
    }
    const Scalar t2 = theta * theta;
    return I + (Scalar(1) - std::cos(theta)) / t2 * K + (theta - std::sin(theta)) / (t2 * theta) * K * K;
}

/// Inverse of the left Jacobian.
template <typename Derived>
Matrix3<typename Derived::Scalar> so3_left_jacobian_inverse(const Eigen::MatrixBase<Derived>& phi) {
    using Scalar = typename Derived::Scalar;
    const Scalar theta = phi.norm();
    const Matrix3<Scalar> K = skew(phi);
    const Matrix3<Scalar> I = Matrix3<Scalar>::Identity();
    if (theta < Scalar(kSmallAngle)) {
        return I - K / Scalar(2) + K * K / Scalar(12);
    }
    const Scalar half = theta / Scalar(2);
    const Scalar coeff = (Scalar(1) - half * std::cos(half) / std::sin(half)) / (theta * theta);
    return I - K / Scalar(2) + coeff * K * K;
}

/// 2 * sum_k phi^k / (k+2)!, i.e. 2 int_0^1 int_0^s exp(r phi^x) dr ds.
/// Appears in the exact position increment under constant specific force.
template <typename Derived>
Matrix3<typename Derived::Scalar> so3_double_integral(const Eigen::MatrixBase<Derived>& phi) {
    using Scalar = typename Derived::Scalar;
    const Scalar theta = phi.norm();
    const Matrix3<Scalar> K = skew(phi);
    const Matrix3<Scalar> I = Matrix3<Scalar>::Identity();
    if (theta < Scalar(1e-4)) {
        return I + K / Scalar(3) + K * K / Scalar(12);
    }
    const Scalar t2 = theta * theta;
    return I + Scalar(2) * (theta - std::sin(theta)) / (t2 * theta) * K +
           Scalar(2) * (t2 / Scalar(2) + std::cos(theta) - Scalar(1)) / (t2 * t2) * K * K;
}

/// Rotation in SO(3). Stored as a unit quaternion.
template <typename Scalar_>
class Rot3 {
public:
    using Scalar = Scalar_;
    using Vector = Vector3<Scalar>;
    using Matrix = Matrix3<Scalar>;
    using Quaternion = Eigen::Quaternion<Scalar>;

    Rot3() : q_(Quaternion::Identity()) {}
    explicit Rot3(const Quaternion& q) : q_(q.normalized()) {}

    static Rot3 identity() { return Rot3(); }

    /// Projects an approximately orthonormal matrix onto SO(3).
    static Rot3 from_matrix(const Matrix& m) { return Rot3(Quaternion(m)); }

    /// Anticlockwise rotation by `theta` about e3. Leaves e3 fixed exactly.
    static Rot3 yaw(Scalar theta) {
        const Scalar h = theta / Scalar(2);
        Rot3 r;
        r.q_ = Quaternion(std::cos(h), Scalar(0), Scalar(0), std::sin(h));
        return r;
    }

    /// Minimal rotation taking direction `from` onto direction `to`.
    static Rot3 from_two_vectors(const Vector& from, const Vector& to) {
        return Rot3(Quaternion::FromTwoVectors(from, to));
    }

    static Rot3 exp(const Vector& w) {
        const Scalar theta = w.norm();
        Rot3 r;
        if (theta < Scalar(kSmallAngle)) {
            const Vector half = w / Scalar(2);
            r.q_ = Quaternion(Scalar(1) - theta * theta / Scalar(8), half.x(), half.y(), half.z());
        } else {
            const Vector axis = w / theta;
            const Scalar s = std::sin(theta / Scalar(2));
            r.q_ = Quaternion(std::cos(theta / Scalar(2)), s * axis.x(), s * axis.y(), s * axis.z());
        }
        r.q_.normalize();
        return r;
    }

    /// Rotation vector with angle in [0, pi]. Uses atan2 of the quaternion,
    /// which stays accurate up to and including the cut locus.
    Vector log() const {
        Quaternion q = q_;
        if (q.w() < Scalar(0)) {
            q.coeffs() = -q.coeffs();
        }
        const Vector v = q.vec();
        const Scalar sin_half = v.norm();
        if (sin_half < Scalar(kSmallAngle)) {
            // theta / sin(theta/2) ~ 2 (1 + theta^2/24)
            return Scalar(2) * v / q.w() * (Scalar(1) - sin_half * sin_half / (Scalar(3) * q.w() * q.w()));
        }
        const Scalar theta = Scalar(2) * std::atan2(sin_half, q.w());
        return theta / sin_half * v;
    }

    /// True when the rotation angle is within `margin` of pi, where the
    /// logarithm loses its unique direction.
    bool near_cut_locus(Scalar margin = Scalar(kSmallAngle)) const {
        return angle() > Scalar(M_PI) - margin;
    }

    Scalar angle() const {
        return Scalar(2) * std::atan2(q_.vec().norm(), std::abs(q_.w()));
    }

    Rot3 inverse() const {
        Rot3 r;
        r.q_ = q_.conjugate();
        r.compositions_ = compositions_;
        return r;
    }

    Rot3 operator*(const Rot3& other) const {
        Rot3 r;
        r.q_ = q_ * other.q_;
        r.compositions_ = compositions_ + other.compositions_ + 1;
        if (r.compositions_ >= rotation_renormalisation_interval().load(std::memory_order_relaxed)) {
            r.q_.normalize();
            r.compositions_ = 0;
        }
        return r;
    }

    Vector operator*(const Vector& p) const { return q_ * p; }

    Matrix matrix() const { return q_.toRotationMatrix(); }
    const Quaternion& quaternion() const { return q_; }

    template <typename NewScalar>
    Rot3<NewScalar> cast() const {
        return Rot3<NewScalar>(q_.template cast<NewScalar>());
    }

private:
    Quaternion q_;
    int compositions_ = 0;
};

using Rot3d = Rot3<double>;

}  // namespace eqfvio
