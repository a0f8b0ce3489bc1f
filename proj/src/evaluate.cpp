#include "eqfvio/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eqfvio {

std::vector<std::pair<std::size_t, std::size_t>> match_by_time(const Trajectory3& estimate, const Trajectory3& truth,
                                                                double tolerance) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (truth.empty()) {
        return pairs;
    }
    std::size_t j = 0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double t = estimate[i].t;
        while (j + 1 < truth.size() && std::abs(truth[j + 1].t - t) <= std::abs(truth[j].t - t)) {
            ++j;
        }
        if (std::abs(truth[j].t - t) <= tolerance) {
            pairs.emplace_back(i, j);
        }
    }
    return pairs;
}

GaugeAlignment align_gauge(const std::vector<Eigen::Vector3d>& estimate, const std::vector<Eigen::Vector3d>& truth) {
    if (estimate.size() != truth.size() || estimate.empty()) {
        throw std::invalid_argument("align_gauge: need matching, non-empty point lists");
    }
    const auto n = static_cast<double>(estimate.size());
    Eigen::Vector3d me = Eigen::Vector3d::Zero();
    Eigen::Vector3d mt = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        me += estimate[i];
        mt += truth[i];
    }
    me /= n;
    mt /= n;

    double dot = 0.0, cross = 0.0, spread = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const Eigen::Vector2d a = (estimate[i] - me).head<2>();
        const Eigen::Vector2d b = (truth[i] - mt).head<2>();
        dot += a.dot(b);
        cross += a.x() * b.y() - a.y() * b.x();
        spread += a.squaredNorm();
    }
    GaugeAlignment out;
    double yaw = 0.0;
    if (spread <= 1e-24 * std::max(1.0, me.squaredNorm()) || std::hypot(dot, cross) == 0.0) {
        out.degenerate = true;
    } else {
        yaw = std::atan2(cross, dot);
    }
    // truth ~ T(estimate) with T = (yaw, t); gauge_act applies S^{-1}, so S = T^{-1}
    const GaugeElementd T(yaw, mt - Rot3d::yaw(yaw) * me);
    out.gauge = T.inverse();
    return out;
}

Trajectory3 apply_gauge(const GaugeElementd& gauge, const Trajectory3& traj) {
    const Pose3d S_inv = gauge.inverse().pose();
    Trajectory3 out = traj;
    for (auto& s : out) {
        s.pose = S_inv * s.pose;
    }
    return out;
}

Evaluation evaluate_trajectory(const Trajectory3& estimate, const Trajectory3& truth, double from_time) {
    const auto pairs = match_by_time(estimate, truth);
    Evaluation ev;
    std::vector<Eigen::Vector3d> est;
    for (const auto& [i, j] : pairs) {
        if (estimate[i].t < from_time) {
            continue;
        }
        ev.times.push_back(estimate[i].t);
        est.push_back(estimate[i].pose.translation());
        ev.reference.push_back(truth[j].pose.translation());
    }
    if (est.empty()) {
        throw std::runtime_error("evaluate: estimate and truth do not overlap in time");
    }
    ev.alignment = align_gauge(est, ev.reference);
    const Pose3d S_inv = ev.alignment.gauge.inverse().pose();
    double sum = 0.0;
    for (std::size_t k = 0; k < est.size(); ++k) {
        ev.aligned.push_back(S_inv * est[k]);
        const double e = (ev.aligned.back() - ev.reference[k]).norm();
        ev.errors.push_back(e);
        sum += e * e;
    }
    ev.rmse = std::sqrt(sum / static_cast<double>(est.size()));
    return ev;
}

double rmse(const Trajectory3& aligned, const Trajectory3& truth) {
    const auto pairs = match_by_time(aligned, truth);
    if (pairs.empty()) {
        throw std::runtime_error("rmse: no time-matched samples");
    }
    double sum = 0.0;
    for (const auto& [i, j] : pairs) {
        sum += (aligned[i].pose.translation() - truth[j].pose.translation()).squaredNorm();
    }
    return std::sqrt(sum / static_cast<double>(pairs.size()));
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw std::invalid_argument("percentile: empty input");
    }
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace eqfvio
