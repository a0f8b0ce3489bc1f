#pragma once

#include "eqfvio/lie/se3.hpp"

namespace eqfvio {

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar theta) {
    Scalar w = std::remainder(theta, Scalar(2 * M_PI));
    if (w <= -Scalar(M_PI)) {
        w += Scalar(2 * M_PI);
    }
    return w;
}

/// Change of inertial frame preserving the gravity axis: yaw about e3 plus
/// a translation. Product (t1 + t2, x1 + R_e3(t1) x2).
template <typename Scalar_>
class GaugeElement {
public:
    using Scalar = Scalar_;
    using Vector = Vector3<Scalar>;

    GaugeElement() : translation_(Vector::Zero()) {}
    GaugeElement(Scalar yaw, const Vector& translation) : yaw_(wrap_angle(yaw)), translation_(translation) {}

    static GaugeElement identity() { return GaugeElement(); }

    GaugeElement operator*(const GaugeElement& o) const {
        return GaugeElement(yaw_ + o.yaw_, translation_ + Rot3<Scalar>::yaw(yaw_) * o.translation_);
    }

    // The closed form printed alongside the group definition is
    // (-theta, -R_e3(theta) x); the axioms require R_e3(-theta) instead.
    GaugeElement inverse() const { return GaugeElement(-yaw_, -(Rot3<Scalar>::yaw(-yaw_) * translation_)); }

    /// The corresponding element of SE_e3(3).
    Pose<Scalar> pose() const { return Pose<Scalar>(Rot3<Scalar>::yaw(yaw_), translation_); }

    Vector operator*(const Vector& p) const { return Rot3<Scalar>::yaw(yaw_) * p + translation_; }

    Scalar yaw() const { return yaw_; }
    const Vector& translation() const { return translation_; }

private:
    Scalar yaw_ = Scalar(0);
    Vector translation_;
};

using GaugeElementd = GaugeElement<double>;

}  // namespace eqfvio
