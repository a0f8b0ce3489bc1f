#include "eqfvio/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "eqfvio/config.hpp"

namespace eqfvio {

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open " + path);
    }
    return f;
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
    throw ParseError(name + ":" + std::to_string(line) + ": " + what);
}

std::vector<double> split_numbers(const std::string& line, const std::string& name, int lineno) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        const std::size_t end = comma == std::string::npos ? line.size() : comma;
        std::size_t b = pos, e = end;
        while (b < e && (line[b] == ' ' || line[b] == '\t')) {
            ++b;
        }
        while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t' || line[e - 1] == '\r')) {
            --e;
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(line.data() + b, line.data() + e, v);
        if (b == e || ec != std::errc() || ptr != line.data() + e || !std::isfinite(v)) {
            fail(name, lineno, "cannot parse field '" + line.substr(b, e - b) + "'");
        }
        out.push_back(v);
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

std::string strip(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c != ' ' && c != '\t' && c != '\r') {
            out += c;
        }
    }
    return out;
}

// Reads the header and hands each data row (with its line number) to `row`.
template <typename Row>
void for_each_row(std::istream& in, const std::string& name, const std::vector<std::string>& headers, Row&& row) {
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) {
        fail(name, 1, "missing header");
    }
    ++lineno;
    const std::string h = strip(line);
    bool ok = false;
    for (const auto& want : headers) {
        ok = ok || h == want;
    }
    if (!ok) {
        fail(name, lineno, "unexpected header '" + h + "', expected '" + headers.front() + "'");
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (strip(line).empty()) {
            continue;
        }
        row(split_numbers(line, name, lineno), lineno);
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<ImuInput> read_imu_csv(std::istream& in, const std::string& name) {
    std::vector<ImuInput> out;
    for_each_row(in, name, {"t,wx,wy,wz,ax,ay,az"}, [&](const std::vector<double>& v, int lineno) {
        if (v.size() != 7) {
            fail(name, lineno, "expected 7 fields, got " + std::to_string(v.size()));
        }
        if (!out.empty() && !(v[0] > out.back().t)) {
            fail(name, lineno, "timestamp " + format_double(v[0]) + " is not after the previous sample");
        }
        out.push_back({{v[1], v[2], v[3]}, {v[4], v[5], v[6]}, v[0]});
    });
    return out;
}

std::vector<ImuInput> read_imu_csv(const std::string& path) {
    auto f = open_input(path);
    return read_imu_csv(f, path);
}

void write_imu_csv(std::ostream& out, const std::vector<ImuInput>& imu) {
    out << "t,wx,wy,wz,ax,ay,az\n";
    for (const auto& u : imu) {
        out << format_double(u.t);
        for (int k = 0; k < 3; ++k) {
            out << ',' << format_double(u.omega(k));
        }
        for (int k = 0; k < 3; ++k) {
            out << ',' << format_double(u.accel(k));
        }
        out << '\n';
    }
}

std::vector<MeasurementBatch> read_features_csv(std::istream& in, const std::string& name) {
    std::vector<MeasurementBatch> out;
    std::set<int> ids_in_batch;
    for_each_row(in, name, {"t,id,bx,by,bz"}, [&](const std::vector<double>& v, int lineno) {
        if (v.size() != 5) {
            fail(name, lineno, "expected 5 fields, got " + std::to_string(v.size()));
        }
        if (v[1] != std::floor(v[1]) || std::abs(v[1]) > 2e9) {
            fail(name, lineno, "landmark id must be an integer");
        }
        const int id = static_cast<int>(v[1]);
        const Eigen::Vector3d b(v[2], v[3], v[4]);
        if (std::abs(b.norm() - 1.0) > kBearingNormTolerance) {
            fail(name, lineno, "bearing norm " + format_double(b.norm()) + " is not 1");
        }
        if (out.empty() || v[0] != out.back().t) {
            if (!out.empty() && v[0] < out.back().t) {
                fail(name, lineno, "timestamps must be non-decreasing");
            }
            out.push_back({v[0], {}});
            ids_in_batch.clear();
        }
        if (!ids_in_batch.insert(id).second) {
            fail(name, lineno, "duplicate landmark " + std::to_string(id) + " at t=" + format_double(v[0]));
        }
        out.back().bearings.push_back({id, b.normalized()});
    });
    return out;
}

std::vector<MeasurementBatch> read_features_csv(const std::string& path) {
    auto f = open_input(path);
    return read_features_csv(f, path);
}

void write_features_csv(std::ostream& out, const std::vector<MeasurementBatch>& frames) {
    out << "t,id,bx,by,bz\n";
    for (const auto& batch : frames) {
        for (const auto& m : batch.bearings) {
            out << format_double(batch.t) << ',' << m.id << ',' << format_double(m.bearing.x()) << ','
                << format_double(m.bearing.y()) << ',' << format_double(m.bearing.z()) << '\n';
        }
    }
}

Trajectory3 read_trajectory_csv(std::istream& in, const std::string& name) {
    Trajectory3 out;
    for_each_row(in, name,
                 {"t,px,py,pz,qw,qx,qy,qz,vx,vy,vz", "t,px,py,pz,qw,qx,qy,qz", "t,px,py,pz"},
                 [&](const std::vector<double>& v, int lineno) {
                     if (v.size() != 4 && v.size() != 8 && v.size() != 11) {
                         fail(name, lineno, "expected 4, 8 or 11 fields, got " + std::to_string(v.size()));
                     }
                     TrajectorySample s;
                     s.t = v[0];
                     Rot3d R;
                     if (v.size() >= 8) {
                         const Eigen::Quaterniond q(v[4], v[5], v[6], v[7]);
                         if (q.norm() < 1e-9) {
                             fail(name, lineno, "zero quaternion");
                         }
                         R = Rot3d(q);
                     }
                     s.pose = Pose3d(R, {v[1], v[2], v[3]});
                     if (v.size() == 11) {
                         s.velocity = {v[8], v[9], v[10]};
                     }
                     if (!out.empty() && !(s.t > out.back().t)) {
                         fail(name, lineno, "timestamps must be strictly increasing");
                     }
                     out.push_back(s);
                 });
    return out;
}

Trajectory3 read_trajectory_csv(const std::string& path) {
    auto f = open_input(path);
    return read_trajectory_csv(f, path);
}

namespace {

void write_pose(std::ostream& out, const TrajectorySample& s) {
    const Eigen::Vector3d& x = s.pose.translation();
    const Eigen::Quaterniond& q = s.pose.rotation().quaternion();
    out << format_double(s.t) << ',' << format_double(x.x()) << ',' << format_double(x.y()) << ','
        << format_double(x.z()) << ',' << format_double(q.w()) << ',' << format_double(q.x()) << ','
        << format_double(q.y()) << ',' << format_double(q.z());
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory3& traj) {
    out << "t,px,py,pz,qw,qx,qy,qz,vx,vy,vz\n";
    for (const auto& s : traj) {
        write_pose(out, s);
        out << ',' << format_double(s.velocity.x()) << ',' << format_double(s.velocity.y()) << ','
            << format_double(s.velocity.z()) << '\n';
    }
}

void write_truth_csv(std::ostream& out, const Trajectory3& traj) {
    out << "t,px,py,pz,qw,qx,qy,qz\n";
    for (const auto& s : traj) {
        write_pose(out, s);
        out << '\n';
    }
}

CameraExtrinsics read_extrinsics(const std::string& path) {
    const KeyValues kv = read_key_values(path);
    for (const auto& [key, value] : kv) {
        if (key != "qw" && key != "qx" && key != "qy" && key != "qz" && key != "tx" && key != "ty" && key != "tz") {
            throw std::invalid_argument(path + ": unknown extrinsics key " + key);
        }
    }
    const Eigen::Quaterniond q(get_double(kv, "qw", 1.0), get_double(kv, "qx", 0.0), get_double(kv, "qy", 0.0),
                               get_double(kv, "qz", 0.0));
    if (q.norm() < 1e-9) {
        throw std::invalid_argument(path + ": zero quaternion");
    }
    CameraExtrinsics cam;
    cam.body_from_camera =
        Pose3d(Rot3d(q), {get_double(kv, "tx", 0.0), get_double(kv, "ty", 0.0), get_double(kv, "tz", 0.0)});
    return cam;
}

std::string extrinsics_text(const CameraExtrinsics& cam) {
    const Eigen::Quaterniond& q = cam.body_from_camera.rotation().quaternion();
    const Eigen::Vector3d& t = cam.body_from_camera.translation();
    std::ostringstream out;
    out << "# body from camera\n";
    out << "qw = " << format_double(q.w()) << "\nqx = " << format_double(q.x()) << "\nqy = " << format_double(q.y())
        << "\nqz = " << format_double(q.z()) << "\ntx = " << format_double(t.x()) << "\nty = " << format_double(t.y())
        << "\ntz = " << format_double(t.z()) << "\n";
    return out.str();
}

}  // namespace eqfvio
