#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eqfvio/lie.hpp"
#include "eqfvio/sampler.hpp"
#include "support.hpp"

using namespace eqfvio;
using eqfvio::test::max_abs;

TEST_CASE("skew matches the cross product") {
    Eigen::Matrix3d expected;
    expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
    CHECK(max_abs(skew(Eigen::Vector3d(1, 2, 3)) - expected) == 0.0);
    CHECK(max_abs(skew(Eigen::Vector3d::Zero())) == 0.0);

    Sampler s(11);
    for (int k = 0; k < 1000; ++k) {
        const Eigen::Vector3d w = s.vector3(), p = s.vector3();
        const Eigen::Matrix3d W = skew(w);
        CHECK(max_abs(W + W.transpose()) == 0.0);
        CHECK(max_abs(W * p - w.cross(p)) < 1e-14);
        CHECK(max_abs(skew(w) * p + skew(p) * w) < 1e-14);
        CHECK(max_abs(vee(W) - w) == 0.0);
    }
}

TEST_CASE("identity composes neutrally in every group") {
    Sampler s(12);
    const Rot3d r = s.rotation();
    CHECK(max_abs((Rot3d::identity() * r).matrix() - r.matrix()) < 1e-15);
    const Pose3d p = s.pose();
    CHECK(max_abs((Pose3d::identity() * p).matrix() - p.matrix()) < 1e-15);
    const ScaledRotd q = s.scaled_rotation();
    CHECK(max_abs((ScaledRotd::identity() * q).matrix() - q.matrix()) < 1e-15);
    const GaugeElementd g = s.gauge();
    const GaugeElementd gi = GaugeElementd::identity() * g;
    CHECK(gi.yaw() == doctest::Approx(g.yaw()).epsilon(1e-15));
    CHECK(max_abs(gi.translation() - g.translation()) == 0.0);
}

TEST_CASE("ExtPose product with identity poses adds the auxiliary vectors") {
    const ExtPosed a(Pose3d::identity(), Eigen::Vector3d(1, 0, 0));
    const ExtPosed b(Pose3d::identity(), Eigen::Vector3d(0, 1, 0));
    const ExtPosed c = a * b;
    CHECK(max_abs(c.pose().matrix() - Eigen::Matrix4d::Identity()) == 0.0);
    CHECK(max_abs(c.aux() - Eigen::Vector3d(1, 1, 0)) == 0.0);
}

TEST_CASE("group axioms over random samples") {
    Sampler s(13);
    for (int k = 0; k < 1000; ++k) {
        const Pose3d a = s.pose(), b = s.pose(), c = s.pose();
        CHECK(max_abs(((a * b) * c).matrix() - (a * (b * c)).matrix()) < 1e-10);
        CHECK(max_abs((a * a.inverse()).matrix() - Eigen::Matrix4d::Identity()) < 1e-10);
        CHECK(max_abs(a.inverse().inverse().matrix() - a.matrix()) < 1e-10);

        const ExtPosed x = s.ext_pose(), y = s.ext_pose(), z = s.ext_pose();
        const ExtPosed l = (x * y) * z, r = x * (y * z);
        CHECK(max_abs(l.pose().matrix() - r.pose().matrix()) < 1e-10);
        CHECK(max_abs(l.aux() - r.aux()) < 1e-10);
        const ExtPosed e = x * x.inverse();
        CHECK(max_abs(e.pose().matrix() - Eigen::Matrix4d::Identity()) < 1e-10);
        CHECK(max_abs(e.aux()) < 1e-10);

        const ScaledRotd q = s.scaled_rotation();
        CHECK(max_abs((q * q.inverse()).matrix() - Eigen::Matrix3d::Identity()) < 1e-10);
    }
}

TEST_CASE("ScaledRot inverse transposes and reciprocates") {
    Sampler s(14);
    const ScaledRotd q = s.scaled_rotation();
    const ScaledRotd qi = q.inverse();
    CHECK(max_abs(qi.rotation().matrix() - q.rotation().matrix().transpose()) < 1e-15);
    CHECK(qi.scale() == doctest::Approx(1.0 / q.scale()).epsilon(1e-15));
    CHECK_THROWS_AS(ScaledRotd(Rot3d::identity(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ScaledRotd(Rot3d::identity(), -1.0), std::invalid_argument);
}

TEST_CASE("gauge inverse") {
    // The alternative closed form (-theta, -R(theta) x) is only an inverse for x on the axis
    // or theta in {0, pi}; the axioms need R(-theta).
    const GaugeElementd g(0.9, Eigen::Vector3d(1.0, -2.0, 0.5));
    const GaugeElementd e = g * g.inverse();
    CHECK(std::abs(e.yaw()) < 1e-15);
    CHECK(max_abs(e.translation()) < 1e-15);

    const GaugeElementd printed(-g.yaw(), -(Rot3d::yaw(g.yaw()) * g.translation()));
    CHECK(max_abs((g * printed).translation()) > 0.1);

    Sampler s(15);
    for (int k = 0; k < 1000; ++k) {
        const GaugeElementd a = s.gauge(), b = s.gauge();
        CHECK(max_abs((a * b).pose().matrix() - (a.pose() * b.pose()).matrix()) < 1e-10);
        CHECK(max_abs(a.pose().rotation().matrix() * Eigen::Vector3d::UnitZ() - Eigen::Vector3d::UnitZ()) <
              1e-15);
        const GaugeElementd ai = a.inverse().inverse();
        CHECK(max_abs(ai.translation() - a.translation()) < 1e-10);
    }
}

TEST_CASE("inverse of identity is identity") {
    CHECK(max_abs(Rot3d::identity().inverse().matrix() - Eigen::Matrix3d::Identity()) == 0.0);
    CHECK(max_abs(Pose3d::identity().inverse().matrix() - Eigen::Matrix4d::Identity()) == 0.0);
    CHECK(max_abs(ExtPosed::identity().inverse().aux()) == 0.0);
}

TEST_CASE("exponential and logarithm") {
    CHECK(max_abs(Rot3d::exp(Eigen::Vector3d::Zero()).matrix() - Eigen::Matrix3d::Identity()) == 0.0);
    CHECK(max_abs(Pose3d::exp({}).matrix() - Eigen::Matrix4d::Identity()) == 0.0);

    const Rot3d quarter = Rot3d::exp(Eigen::Vector3d(M_PI / 2, 0, 0));
    CHECK(max_abs(quarter * Eigen::Vector3d::UnitY() - Eigen::Vector3d::UnitZ()) < 1e-15);

    Sampler s(16);
    for (int k = 0; k < 1000; ++k) {
        Eigen::Vector3d w = s.vector3();
        w *= s.uniform(0.0, 0.999) / w.norm();
        CHECK(max_abs(Rot3d::exp(w).log() - w) < 1e-9);

        Se3Tangentd u{w, s.vector3()};
        CHECK(max_abs(Pose3d::exp(u).log().vector() - u.vector()) < 1e-9);

        const double sc = s.uniform(-1.0, 1.0);
        const ScaledRotd q = ScaledRotd::exp(w, sc);
        CHECK(q.log_scale() == doctest::Approx(sc).epsilon(1e-12));
        CHECK(max_abs(q.log_rotation() - w) < 1e-9);
    }
}

TEST_CASE("small angles use the series and stay accurate") {
    for (double t : {1e-12, 1e-9, 1e-7, 2e-6, 1e-4}) {
        const Eigen::Vector3d w = t * Eigen::Vector3d(0.3, -0.5, 0.8).normalized();
        CHECK(max_abs(Rot3d::exp(w).log() - w) < 1e-15);
        CHECK(max_abs(Rot3d::exp(w).matrix() - (Eigen::Matrix3d::Identity() + skew(w))) < t * t);
    }
}

TEST_CASE("near a half turn the logarithm flags the cut locus") {
    const Rot3d r = Rot3d::exp(Eigen::Vector3d(M_PI - 1e-9, 0, 0));
    CHECK(r.near_cut_locus());
    CHECK_FALSE(Rot3d::exp(Eigen::Vector3d(1.0, 0, 0)).near_cut_locus());
    CHECK(std::abs(r.log().norm() - M_PI) < 1e-6);
}

TEST_CASE("adjoint") {
    Sampler s(17);
    const Se3Tangentd t{s.vector3(), s.vector3()};
    CHECK(max_abs(Pose3d::identity().adjoint(t).vector() - t.vector()) == 0.0);

    const Eigen::Vector3d x(0.4, -1.0, 2.0);
    const Se3Tangentd pt = Pose3d(Rot3d::identity(), x).adjoint(t);
    CHECK(max_abs(pt.angular - t.angular) < 1e-15);
    CHECK(max_abs(pt.linear - (t.linear + x.cross(t.angular))) < 1e-15);

    for (int k = 0; k < 1000; ++k) {
        const Pose3d P = s.pose();
        const Se3Tangentd u{s.vector3(), s.vector3()};
        const Eigen::Matrix4d conj = P.matrix() * u.hat() * P.inverse().matrix();
        CHECK(max_abs(P.adjoint(u).vector() - Se3Tangentd::vee(conj).vector()) < 1e-10);
        CHECK(max_abs(P.adjoint_matrix() * u.vector() - P.adjoint(u).vector()) < 1e-10);
        CHECK(max_abs(adjoint_inverse(P, P.adjoint(u)).vector() - u.vector()) < 1e-10);
    }
}

TEST_CASE("yaw rotation keeps the vertical exactly") {
    CHECK(max_abs(Rot3d::yaw(0.0).matrix() - Eigen::Matrix3d::Identity()) == 0.0);
    CHECK(max_abs(Rot3d::yaw(M_PI / 2) * Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitY()) < 1e-15);
    Sampler s(18);
    for (int k = 0; k < 1000; ++k) {
        const Rot3d r = Rot3d::yaw(s.uniform(-10.0, 10.0));
        CHECK(max_abs(r * Eigen::Vector3d::UnitZ() - Eigen::Vector3d::UnitZ()) < 1e-15);
    }
}

TEST_CASE("rotations stay orthonormal through long products") {
    Sampler s(19);
    Rot3d r;
    for (int k = 0; k < 100000; ++k) {
        r = r * Rot3d::exp(s.vector3(0.1));
    }
    const Eigen::Matrix3d m = r.matrix();
    CHECK(max_abs(m.transpose() * m - Eigen::Matrix3d::Identity()) < 1e-10);
    CHECK(m.determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("groups are generic in the scalar") {
    const Rot3<long double> r = Rot3<long double>::exp(Vector3<long double>(0.1L, 0.2L, -0.3L));
    const Pose<float> p(Rot3<float>::exp(Vector3<float>(0.1f, 0.0f, 0.0f)), Vector3<float>(1, 2, 3));
    CHECK(std::abs(static_cast<double>((r * r.inverse()).angle())) < 1e-15);
    CHECK((p * p.inverse()).translation().norm() < 1e-5f);
    const Rot3d rd = r.cast<double>();
    CHECK(max_abs(rd.log() - Eigen::Vector3d(0.1, 0.2, -0.3)) < 1e-15);
}
