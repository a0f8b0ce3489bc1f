#include "eqfvio/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "eqfvio/io.hpp"

namespace eqfvio {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

class Runner {
public:
    Runner(const CameraExtrinsics& cam, const GainConfig& gains, const PipelineOptions& opts)
        : cam_(cam), gains_(gains), opts_(opts) {
        if (opts.max_landmarks <= 0 || opts.min_landmarks <= 0 || opts.min_landmarks >= opts.max_landmarks) {
            throw std::invalid_argument("pipeline: landmark limits must satisfy 0 < min < max");
        }
    }

    void imu(const ImuInput& u) {
        if (!started_) {
            start(u);
        } else {
            advance(u.t);
        }
        last_u_ = u;
        record(u.t);
    }

    void frame(const MeasurementBatch& batch) {
        if (!started_) {
            result_.warnings.push_back("frame at t=" + format_double(batch.t) + " precedes the first IMU sample");
            return;
        }
        advance(batch.t);
        const auto t0 = Clock::now();
        manage_landmarks(batch);
        update(fs_, batch, gains_, cam_);
        quarantine_near_landmarks();
        update_ms_ += elapsed_ms(t0);
    }

    RunResult finish() {
        result_.final_state = fs_;
        return std::move(result_);
    }

private:
    void start(const ImuInput& u) {
        const Pose3d pose = gains_.init_pose ? *gains_.init_pose : level_from_accel(u.accel);
        const Eigen::Vector3d v = gains_.init_velocity ? *gains_.init_velocity : Eigen::Vector3d::Zero();
        fs_ = make_filter(pose, v, gains_.init_bias, gains_);
        t_ = u.t;
        started_ = true;
    }

    // Propagates with the held input from t_ to t.
    void advance(double t) {
        if (t < t_) {
            throw std::logic_error("pipeline: event at t=" + format_double(t) + " precedes the filter time " +
                                   format_double(t_));
        }
        const double gap = t - t_;
        if (gap > gains_.gap) {
            result_.warnings.push_back("gap of " + format_double(gap) + " s before t=" + format_double(t) +
                                       "; covariance reset, propagation skipped");
            reset_covariance();
            t_ = t;
            return;
        }
        const auto t0 = Clock::now();
        const int steps = std::max(1, static_cast<int>(std::ceil(gap / gains_.max_step - 1e-12)));
        const double dt = gap / steps;
        for (int k = 0; k < steps && dt > 0.0; ++k) {
            for (int id : propagate(fs_, last_u_, dt, gains_, cam_)) {
                result_.warnings.push_back("landmark " + std::to_string(id) + " quarantined at t=" + format_double(t));
            }
        }
        propagate_ms_ += elapsed_ms(t0);
        t_ = t;
    }

    void reset_covariance() {
        const Eigen::MatrixXd S0 = gains_.initial_covariance(fs_.size());
        const Eigen::Index m = S0.rows() - kBiasDim;
        fs_.Sigma.bottomRows(m).setZero();
        fs_.Sigma.rightCols(m).setZero();
        fs_.Sigma.bottomRightCorner(m, m) = S0.bottomRightCorner(m, m);
    }

    void manage_landmarks(const MeasurementBatch& batch) {
        std::map<int, const Measurement*> seen;
        for (const auto& m : batch.bearings) {
            seen[m.id] = &m;
        }
        for (int id : fs_.ids()) {
            if (seen.count(id) == 0) {
                remove_landmark(fs_, id);
            }
        }
        std::map<int, int> next_age;
        for (const auto& [id, m] : seen) {
            const auto it = age_.find(id);
            next_age[id] = it == age_.end() ? 1 : it->second + 1;
        }
        age_ = std::move(next_age);

        if (static_cast<int>(fs_.size()) >= opts_.min_landmarks) {
            return;
        }
        std::vector<int> candidates;
        for (const auto& [id, m] : seen) {
            if (fs_.slot(id) < 0 && fs_.quarantined.count(id) == 0) {
                candidates.push_back(id);
            }
        }
        std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
            const int aa = age_.at(a), ab = age_.at(b);
            return aa != ab ? aa > ab : a < b;
        });
        for (int id : candidates) {
            if (static_cast<int>(fs_.size()) >= opts_.max_landmarks) {
                break;
            }
            add_landmark(fs_, id, seen.at(id)->bearing, gains_, cam_);
        }
    }

    void quarantine_near_landmarks() {
        const TotalState xi = estimated_state(fs_, cam_);
        for (const auto& lm : xi.landmarks) {
            if (!(camera_point(xi, lm, cam_).norm() > gains_.min_depth)) {
                remove_landmark(fs_, lm.id);
                fs_.quarantined.insert(lm.id);
                result_.warnings.push_back("landmark " + std::to_string(lm.id) + " quarantined after update");
            }
        }
    }

    void record(double t) {
        const TotalState xi = estimated_state(fs_, cam_);
        result_.trajectory.push_back({t, xi.pose, xi.velocity});
        result_.diagnostics.push_back(
            {t, static_cast<int>(fs_.size()), fs_.Sigma.trace(), propagate_ms_, update_ms_});
        propagate_ms_ = 0.0;
        update_ms_ = 0.0;
    }

    CameraExtrinsics cam_;
    GainConfig gains_;
    PipelineOptions opts_;
    FilterState fs_;
    ImuInput last_u_;
    double t_ = 0.0;
    bool started_ = false;
    std::map<int, int> age_;
    double propagate_ms_ = 0.0;
    double update_ms_ = 0.0;
    RunResult result_;
};

}  // namespace

Pose3d level_from_accel(const Eigen::Vector3d& accel) {
    if (!(accel.norm() > 0.0)) {
        return Pose3d::identity();
    }
    const Eigen::Vector3d eta = accel.normalized();
    // R = Ry(pitch) Rx(roll) with R^T e3 = eta
    const double pitch = std::asin(std::clamp(-eta.x(), -1.0, 1.0));
    const double roll = std::atan2(eta.y(), eta.z());
    return Pose3d(Rot3d::exp(pitch * Eigen::Vector3d::UnitY()) * Rot3d::exp(roll * Eigen::Vector3d::UnitX()),
                  Eigen::Vector3d::Zero());
}

RunResult run_filter(const std::vector<ImuInput>& imu, const std::vector<MeasurementBatch>& frames,
                     const CameraExtrinsics& cam, const GainConfig& gains, const PipelineOptions& opts) {
    Runner runner(cam, gains, opts);
    std::size_t i = 0, j = 0;
    while (i < imu.size() || j < frames.size()) {
        // IMU first on ties, so the frame sees the state propagated to its own time
        if (j == frames.size() || (i < imu.size() && imu[i].t <= frames[j].t)) {
            runner.imu(imu[i++]);
        } else {
            runner.frame(frames[j++]);
        }
    }
    return runner.finish();
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows) {
    out << "t,landmarks,sigma_trace,propagate_ms,update_ms\n";
    for (const auto& r : rows) {
        out << format_double(r.t) << ',' << r.landmarks << ',' << format_double(r.sigma_trace) << ','
            << format_double(r.propagate_ms) << ',' << format_double(r.update_ms) << '\n';
    }
}

}  // namespace eqfvio
