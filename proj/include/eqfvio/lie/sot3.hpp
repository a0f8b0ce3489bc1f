#pragma once

#include <stdexcept>

#include "eqfvio/lie/so3.hpp"

namespace eqfvio {

/// Positive multiplicative reals MR(1).
template <typename Scalar_>
class PositiveReal {
public:
    using Scalar = Scalar_;

    PositiveReal() = default;
    explicit PositiveReal(Scalar value) : value_(value) {
        if (!(value > Scalar(0))) {
            throw std::invalid_argument("PositiveReal: value must be strictly positive");
        }
    }

    static PositiveReal identity() { return PositiveReal(); }
    static PositiveReal exp(Scalar s) { return PositiveReal(std::exp(s)); }
    Scalar log() const { return std::log(value_); }

    PositiveReal inverse() const { return PositiveReal(Scalar(1) / value_); }
    PositiveReal operator*(const PositiveReal& o) const { return PositiveReal(value_ * o.value_); }

    Scalar value() const { return value_; }

private:
    Scalar value_ = Scalar(1);
};

/// Scaled orthogonal transformation Q = (R_Q, c_Q) acting by Q(q) = c_Q R_Q q.
template <typename Scalar_>
class ScaledRot {
public:
    using Scalar = Scalar_;
    using Vector = Vector3<Scalar>;

    ScaledRot() = default;
    ScaledRot(const Rot3<Scalar>& rotation, Scalar scale) : rotation_(rotation), scale_(scale) {
        if (!(scale > Scalar(0))) {
            throw std::invalid_argument("ScaledRot: scale must be strictly positive");
        }
    }

    static ScaledRot identity() { return ScaledRot(); }

    /// exp(omega, s) = (exp(omega), e^s).
    static ScaledRot exp(const Vector& omega, Scalar s) { return ScaledRot(Rot3<Scalar>::exp(omega), std::exp(s)); }

    /// The element of minimal rotation taking `from` onto `to`, i.e. Q(from) = to.
    static ScaledRot mapping(const Vector& from, const Vector& to) {
        return ScaledRot(Rot3<Scalar>::from_two_vectors(from, to), to.norm() / from.norm());
    }

    Vector log_rotation() const { return rotation_.log(); }
    Scalar log_scale() const { return std::log(scale_); }

    ScaledRot inverse() const { return ScaledRot(rotation_.inverse(), Scalar(1) / scale_); }

    ScaledRot operator*(const ScaledRot& o) const { return ScaledRot(rotation_ * o.rotation_, scale_ * o.scale_); }

    Vector operator*(const Vector& q) const { return scale_ * (rotation_ * q); }

    Matrix3<Scalar> matrix() const { return scale_ * rotation_.matrix(); }

    const Rot3<Scalar>& rotation() const { return rotation_; }
    Scalar scale() const { return scale_; }

private:
    Rot3<Scalar> rotation_;
    Scalar scale_ = Scalar(1);
};

using ScaledRotd = ScaledRot<double>;
using PositiveReald = PositiveReal<double>;

}  // namespace eqfvio
