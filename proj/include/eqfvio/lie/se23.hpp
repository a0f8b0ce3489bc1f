#pragma once

#include "eqfvio/lie/se3.hpp"

namespace eqfvio {

/// Extended pose (A, w) with product (A1 A2, w1 + R_{A1} w2).
template <typename Scalar_>
class ExtPose {
public:
    using Scalar = Scalar_;
    using Vector = Vector3<Scalar>;

    ExtPose() : aux_(Vector::Zero()) {}
    ExtPose(const Pose<Scalar>& pose, const Vector& aux) : pose_(pose), aux_(aux) {}

    static ExtPose identity() { return ExtPose(); }

    /// One-parameter subgroup through (U, u_w): A = exp(U), w = J_l(Omega) u_w.
    static ExtPose exp(const Se3Tangent<Scalar>& u, const Vector& u_aux) {
        return ExtPose(Pose<Scalar>::exp(u), so3_left_jacobian(u.angular) * u_aux);
    }

    // The axioms force (A^{-1}, -R_A^T w); -R_A w only coincides when R_A w = R_A^T w.
    ExtPose inverse() const {
        const Pose<Scalar> a_inv = pose_.inverse();
        return ExtPose(a_inv, -(a_inv.rotation() * aux_));
    }

    ExtPose operator*(const ExtPose& o) const {
        return ExtPose(pose_ * o.pose_, aux_ + pose_.rotation() * o.aux_);
    }

    const Pose<Scalar>& pose() const { return pose_; }
    const Vector& aux() const { return aux_; }

private:
    Pose<Scalar> pose_;
    Vector aux_;
};

using ExtPosed = ExtPose<double>;

}  // namespace eqfvio
