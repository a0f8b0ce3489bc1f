#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "eqfvio/eqf.hpp"
#include "eqfvio/evaluate.hpp"
#include "eqfvio/io.hpp"
#include "eqfvio/oracle.hpp"
#include "eqfvio/pipeline.hpp"
#include "eqfvio/simulate.hpp"

namespace fs = std::filesystem;
using namespace eqfvio;

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return f;
}

int cmd_run(const std::string& imu_path, const std::string& features_path, const std::string& extrinsics_path,
            const std::string& gains_path, const std::string& out_dir, const PipelineOptions& opts) {
    const auto imu = read_imu_csv(imu_path);
    const auto frames = read_features_csv(features_path);
    const CameraExtrinsics cam = extrinsics_path.empty() ? CameraExtrinsics::identity() : read_extrinsics(extrinsics_path);
    const GainConfig gains = gains_path.empty() ? GainConfig{} : GainConfig::load(gains_path);

    const RunResult result = run_filter(imu, frames, cam, gains, opts);
    for (const auto& w : result.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    fs::create_directories(out_dir);
    auto traj = open_output(fs::path(out_dir) / "trajectory.csv");
    write_trajectory_csv(traj, result.trajectory);
    auto diag = open_output(fs::path(out_dir) / "diagnostics.csv");
    write_diagnostics_csv(diag, result.diagnostics);

    double prop = 0.0, upd = 0.0;
    for (const auto& d : result.diagnostics) {
        prop += d.propagate_ms;
        upd += d.update_ms;
    }
    std::printf("%zu poses, %zu frames, final landmarks %zu\n", result.trajectory.size(), frames.size(),
                result.final_state.size());
    std::printf("mean per frame: propagate %.3f ms, update %.3f ms\n",
                frames.empty() ? 0.0 : prop / static_cast<double>(frames.size()),
                frames.empty() ? 0.0 : upd / static_cast<double>(frames.size()));
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir) {
    const ScenarioConfig cfg = scenario_path.empty() ? ScenarioConfig{} : ScenarioConfig::load(scenario_path);
    const Scenario sc = generate_scenario(cfg);
    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    auto imu = open_output(out / "imu.csv");
    write_imu_csv(imu, sc.imu);
    auto feat = open_output(out / "features.csv");
    write_features_csv(feat, sc.frames);
    Trajectory3 truth;
    for (const auto& ts : sc.truth) {
        truth.push_back({ts.t, ts.state.pose, ts.state.velocity});
    }
    auto tr = open_output(out / "truth.csv");
    write_truth_csv(tr, truth);
    auto ext = open_output(out / "extrinsics.cfg");
    ext << extrinsics_text(sc.camera);
    auto gains = open_output(out / "gains.cfg");
    gains << "# initial state from the simulated truth; bias starts at zero\n" << scenario_gains(cfg, sc).to_text();

    std::printf("%zu IMU samples, %zu frames, %zu landmarks -> %s\n", sc.imu.size(), sc.frames.size(),
                sc.landmarks.size(), out_dir.c_str());
    return 0;
}

int cmd_evaluate(const std::string& estimate_path, const std::string& truth_path, const std::string& report_path) {
    const Trajectory3 est = read_trajectory_csv(estimate_path);
    const Trajectory3 truth = read_trajectory_csv(truth_path);
    const Evaluation ev = evaluate_trajectory(est, truth);

    std::ostringstream rep;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "matched samples: %zu\n", ev.errors.size());
    rep << buf;
    std::snprintf(buf, sizeof(buf), "gauge: yaw %.6f rad, translation (%.4f, %.4f, %.4f) m%s\n",
                  ev.alignment.gauge.yaw(), ev.alignment.gauge.translation().x(),
                  ev.alignment.gauge.translation().y(), ev.alignment.gauge.translation().z(),
                  ev.alignment.degenerate ? " [yaw indeterminate]" : "");
    rep << buf;
    std::snprintf(buf, sizeof(buf), "position RMSE: %.3f m\n", ev.rmse);
    rep << buf;
    rep << "position error percentiles (m):\n";
    for (double p : {50.0, 75.0, 90.0, 95.0, 99.0, 100.0}) {
        std::snprintf(buf, sizeof(buf), "  p%-3.0f %.3f\n", p, percentile(ev.errors, p));
        rep << buf;
    }
    rep << "reference RMSE on EuRoC with an image front end: V1_01 0.07 m, V2_01 0.08 m\n";
    std::cout << rep.str();

    if (!report_path.empty()) {
        const fs::path rp(report_path);
        if (rp.has_parent_path()) {
            fs::create_directories(rp.parent_path());
        }
        auto f = open_output(rp);
        f << rep.str();
        fs::path plot = rp;
        plot.replace_extension(".plot.csv");
        auto pf = open_output(plot);
        pf << "t,px,py,pz,tx,ty,tz,error\n";
        for (std::size_t k = 0; k < ev.errors.size(); ++k) {
            const auto& a = ev.aligned[k];
            const auto& r = ev.reference[k];
            pf << format_double(ev.times[k]) << ',' << format_double(a.x()) << ',' << format_double(a.y()) << ','
               << format_double(a.z()) << ',' << format_double(r.x()) << ',' << format_double(r.y()) << ','
               << format_double(r.z()) << ',' << format_double(ev.errors[k]) << '\n';
        }
        std::cout << "plot data: " << plot.string() << "\n";
    }
    return 0;
}

int cmd_oracle(std::uint64_t seed) {
    bool ok = true;
    for (const auto& r : run_oracle_suite(seed)) {
        std::printf("%-4s %-24s %6.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds, r.detail.c_str());
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equivariant filter for visual-inertial odometry on bearing tracks"};
    app.require_subcommand(1);

    std::string imu, features, extrinsics, gains, out;
    PipelineOptions opts;
    auto* run = app.add_subcommand("run", "run the filter on IMU and feature-bearing CSVs");
    run->add_option("--imu", imu, "IMU CSV (t,wx,wy,wz,ax,ay,az)")->required()->check(CLI::ExistingFile);
    run->add_option("--features", features, "feature CSV (t,id,bx,by,bz)")->required()->check(CLI::ExistingFile);
    run->add_option("--extrinsics", extrinsics, "body-from-camera key-value file")->check(CLI::ExistingFile);
    run->add_option("--gains", gains, "gain key-value file")->check(CLI::ExistingFile);
    run->add_option("--out", out, "output directory")->required();
    run->add_option("--max-landmarks", opts.max_landmarks, "tracked landmark limit")->capture_default_str();
    run->add_option("--min-landmarks", opts.min_landmarks, "register new tracks below this count")
        ->capture_default_str();

    std::string scenario, sim_out;
    auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
    sim->add_option("--scenario", scenario, "scenario key-value file")->check(CLI::ExistingFile);
    sim->add_option("--out", sim_out, "output directory")->required();

    std::string estimate, truth, report;
    auto* eval = app.add_subcommand("evaluate", "gauge-aligned position error against ground truth");
    eval->add_option("--estimate", estimate, "trajectory CSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--truth", truth, "ground truth CSV (t,px,py,pz[,qw,qx,qy,qz])")->required()->check(CLI::ExistingFile);
    eval->add_option("--report", report, "report file; per-sample errors go next to it as .plot.csv");

    std::uint64_t seed = 7;
    auto* oracle = app.add_subcommand("oracle", "finite-difference and property verification suite");
    oracle->add_option("--seed", seed, "random seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) {
            return cmd_run(imu, features, extrinsics, gains, out, opts);
        }
        if (*sim) {
            return cmd_simulate(scenario, sim_out);
        }
        if (*eval) {
            return cmd_evaluate(estimate, truth, report);
        }
        if (*oracle) {
            return cmd_oracle(seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
