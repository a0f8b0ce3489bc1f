#include "eqfvio/state.hpp"

#include <string>

#include "eqfvio/sphere.hpp"

namespace eqfvio {

std::vector<int> TotalState::ids() const {
    std::vector<int> out;
    out.reserve(landmarks.size());
    for (const auto& lm : landmarks) {
        out.push_back(lm.id);
    }
    return out;
}

int index_of(const std::vector<int>& ids, int id) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

namespace {

// Position of `id` in a list of id-carrying records, trying the aligned slot first.
template <typename Record>
const Record& find_record(const std::vector<Record>& records, std::size_t hint, int id, const char* what) {
    if (hint < records.size() && records[hint].id == id) {
        return records[hint];
    }
    for (const auto& r : records) {
        if (r.id == id) {
            return r;
        }
    }
    throw std::out_of_range(std::string(what) + ": no entry for landmark id " + std::to_string(id));
}

}  // namespace

SymElement SymElement::identity(const std::vector<int>& ids) {
    SymElement X;
    X.landmarks.reserve(ids.size());
    for (int id : ids) {
        X.landmarks.push_back({id, ScaledRotd::identity()});
    }
    return X;
}

SymElement SymElement::operator*(const SymElement& other) const {
    if (landmarks.size() != other.landmarks.size()) {
        throw std::invalid_argument("SymElement product: landmark counts differ");
    }
    SymElement out;
    out.ext = ext * other.ext;
    out.landmarks.reserve(landmarks.size());
    for (std::size_t i = 0; i < landmarks.size(); ++i) {
        const auto& rhs = find_record(other.landmarks, i, landmarks[i].id, "SymElement product");
        out.landmarks.push_back({landmarks[i].id, landmarks[i].Q * rhs.Q});
    }
    return out;
}

SymElement SymElement::inverse() const {
    SymElement out;
    out.ext = ext.inverse();
    out.landmarks.reserve(landmarks.size());
    for (const auto& lt : landmarks) {
        out.landmarks.push_back({lt.id, lt.Q.inverse()});
    }
    return out;
}

const ScaledRotd& SymElement::Q(int id) const {
    return find_record(landmarks, 0, id, "SymElement::Q").Q;
}

std::vector<int> SymElement::ids() const {
    std::vector<int> out;
    out.reserve(landmarks.size());
    for (const auto& lt : landmarks) {
        out.push_back(lt.id);
    }
    return out;
}

Eigen::VectorXd AlgebraElement::vector() const {
    Eigen::VectorXd v(9 + 4 * landmarks.size());
    v.head<6>() = u.vector();
    v.segment<3>(6) = w_dot;
    for (std::size_t i = 0; i < landmarks.size(); ++i) {
        v.segment<3>(9 + 4 * i) = landmarks[i].omega;
        v(12 + 4 * i) = landmarks[i].alpha;
    }
    return v;
}

AlgebraElement AlgebraElement::from_vector(const Eigen::VectorXd& v, const std::vector<int>& ids) {
    if (v.size() != static_cast<Eigen::Index>(9 + 4 * ids.size())) {
        throw std::invalid_argument("AlgebraElement::from_vector: size mismatch");
    }
    AlgebraElement out;
    out.u = Se3Tangentd::from_vector(v.head<6>());
    out.w_dot = v.segment<3>(6);
    out.landmarks.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out.landmarks.push_back({ids[i], v.segment<3>(9 + 4 * i), v(12 + 4 * i)});
    }
    return out;
}

AlgebraElement AlgebraElement::operator*(double s) const {
    AlgebraElement out = *this;
    out.u = u * s;
    out.w_dot *= s;
    for (auto& lr : out.landmarks) {
        lr.omega *= s;
        lr.alpha *= s;
    }
    return out;
}

SymElement exp(const AlgebraElement& xi) {
    SymElement X;
    X.ext = ExtPosed::exp(xi.u, xi.w_dot);
    X.landmarks.reserve(xi.landmarks.size());
    for (const auto& lr : xi.landmarks) {
        X.landmarks.push_back({lr.id, ScaledRotd::exp(lr.omega, lr.alpha)});
    }
    return X;
}

Eigen::VectorXd TotalTangent::vector() const {
    Eigen::VectorXd v(9 + 3 * p_dot.size());
    v.head<6>() = pose.vector();
    v.segment<3>(6) = v_dot;
    for (std::size_t i = 0; i < p_dot.size(); ++i) {
        v.segment<3>(9 + 3 * i) = p_dot[i].p;
    }
    return v;
}

TotalTangent TotalTangent::from_vector(const Eigen::VectorXd& v, const std::vector<int>& ids) {
    if (v.size() != static_cast<Eigen::Index>(9 + 3 * ids.size())) {
        throw std::invalid_argument("TotalTangent::from_vector: size mismatch");
    }
    TotalTangent out;
    out.pose = Se3Tangentd::from_vector(v.head<6>());
    out.v_dot = v.segment<3>(6);
    out.p_dot.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out.p_dot.push_back({ids[i], v.segment<3>(9 + 3 * i)});
    }
    return out;
}

Eigen::Vector3d camera_point(const TotalState& xi, const Landmark& lm, const CameraExtrinsics& cam) {
    return (xi.pose * cam.body_from_camera).inverse() * lm.p;
}

bool outside_exception_set(const TotalState& xi, const CameraExtrinsics& cam, double min_depth) {
    const Pose3d world_from_camera_inv = (xi.pose * cam.body_from_camera).inverse();
    for (const auto& lm : xi.landmarks) {
        if (!((world_from_camera_inv * lm.p).norm() > min_depth)) {
            return false;
        }
    }
    return true;
}

TotalState gauge_act(const GaugeElementd& S, const TotalState& xi) {
    const Pose3d S_inv = S.inverse().pose();
    TotalState out;
    out.pose = S_inv * xi.pose;
    out.velocity = xi.velocity;
    out.landmarks.reserve(xi.landmarks.size());
    for (const auto& lm : xi.landmarks) {
        out.landmarks.push_back({lm.id, S_inv * lm.p});
    }
    return out;
}

TotalState sym_act_total(const SymElement& X, const TotalState& xi, const CameraExtrinsics& cam, double min_depth) {
    if (X.landmarks.size() != xi.landmarks.size()) {
        throw std::invalid_argument("sym_act_total: landmark counts differ");
    }
    const Pose3d& A = X.A();
    const Pose3d& T_C = cam.body_from_camera;
    TotalState out;
    out.pose = xi.pose * A;
    out.velocity = A.rotation().inverse() * (xi.velocity - X.w());
    out.landmarks.reserve(xi.landmarks.size());

    const Pose3d old_camera_inv = (xi.pose * T_C).inverse();
    const Pose3d new_camera = out.pose * T_C;
    for (std::size_t i = 0; i < xi.landmarks.size(); ++i) {
        const Landmark& lm = xi.landmarks[i];
        const auto& lt = find_record(X.landmarks, i, lm.id, "sym_act_total");
        const Eigen::Vector3d q_new = lt.Q.inverse() * (old_camera_inv * lm.p);
        if (!(q_new.norm() > min_depth)) {
            throw ExceptionSetError(lm.id, "sym_act_total: landmark " + std::to_string(lm.id) +
                                               " mapped into the exception set");
        }
        out.landmarks.push_back({lm.id, new_camera * q_new});
    }
    return out;
}

BearingSet output_act(const SymElement& X, const BearingSet& y) {
    if (X.landmarks.size() != y.size()) {
        throw std::invalid_argument("output_act: landmark counts differ");
    }
    BearingSet out;
    out.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto& lt = find_record(X.landmarks, i, y[i].id, "output_act");
        out.push_back({y[i].id, lt.Q.rotation().inverse() * y[i].y, y[i].valid});
    }
    return out;
}

BearingSet measure(const TotalState& xi, const CameraExtrinsics& cam, double min_depth) {
    const Pose3d camera_inv = (xi.pose * cam.body_from_camera).inverse();
    BearingSet out;
    out.reserve(xi.landmarks.size());
    for (const auto& lm : xi.landmarks) {
        const Eigen::Vector3d q = camera_inv * lm.p;
        const double n = q.norm();
        if (n > min_depth) {
            out.push_back({lm.id, q / n, true});
        } else {
            out.push_back({lm.id, Eigen::Vector3d::Zero(), false});
        }
    }
    return out;
}

SymElement solve_transitive(const TotalState& from, const TotalState& to, const CameraExtrinsics& cam) {
    if (from.landmarks.size() != to.landmarks.size()) {
        throw std::invalid_argument("solve_transitive: landmark counts differ");
    }
    SymElement X;
    const Pose3d A = from.pose.inverse() * to.pose;
    X.ext = ExtPosed(A, from.velocity - A.rotation() * to.velocity);
    X.landmarks.reserve(from.landmarks.size());
    for (std::size_t i = 0; i < from.landmarks.size(); ++i) {
        const Landmark& a = from.landmarks[i];
        const Landmark& b = find_record(to.landmarks, i, a.id, "solve_transitive");
        const Eigen::Vector3d q_from = camera_point(from, a, cam);
        const Eigen::Vector3d q_to = camera_point(to, b, cam);
        // Q^{-1} q_from = q_to  <=>  Q q_to = q_from
        X.landmarks.push_back({a.id, ScaledRotd::mapping(q_to, q_from)});
    }
    return X;
}

}  // namespace eqfvio
