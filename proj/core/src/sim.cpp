#include "loomkit/sim.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "loomkit/errors.hpp"
#include "loomkit/looming.hpp"
#include "loomkit/motion.hpp"

namespace loomkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
const double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kCsvHeader = "time,r,L_true,L1,L2,err1,err2,gamma,delta";

Vec3 paper_t_fn(double tau) {
    const double s = 11.11;
    return {s, 0.1 * s * std::cos(0.1 * tau), 0.1 * s * std::cos(0.2 * tau)};
}

Vec3 paper_omega_fn(double tau) {
    return {std::cos(0.1 * tau), -std::cos(0.3 * tau), 8.0 * kDegToRad * std::sin(0.3 * tau)};
}

struct Rates {
    Vec3 t;
    Vec3 omega;
};

// Interpretation fields applied to the raw time functions: per-axis signs,
// and deg->rad on the first two rotation components when configured.
Rates effective_rates(const SimConfig& config, double tau) {
    const Vec3 t_raw = config.t_fn(tau);
    const Vec3 w_raw = config.omega_fn(tau);
    const double scale = config.omega_ij_unit == OmegaIjUnit::DegPerSec ? kDegToRad : 1.0;
    return {config.axis_signs_t.cwise(t_raw),
            config.axis_signs_omega.cwise(Vec3{w_raw.x * scale, w_raw.y * scale, w_raw.z})};
}

struct PoseDeriv {
    Vec3 v;
    Mat3 rdot;
};

PoseDeriv pose_deriv(const SimConfig& config, double tau, const Mat3& orient) {
    const Rates rates = effective_rates(config, tau);
    if (config.frame == MotionFrame::Body) {
        return {orient * rates.t, orient * Mat3::skew(rates.omega)};
    }
    return {rates.t, Mat3::skew(rates.omega) * orient};
}

std::string fmt_full(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_vec(const Vec3& v) {
    char buf[120];
    std::snprintf(buf, sizeof buf, "[%g,%g,%g]", v.x, v.y, v.z);
    return buf;
}

double parse_field(const std::string& token, const std::string& path) {
    const char* s = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s) {
        throw LoomError(ErrorCode::IoError, "bad numeric field '" + token + "' in " + path);
    }
    return v;
}

Vec3 json_vec3(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw LoomError(ErrorCode::BadConfig, "expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::function<Vec3(double)> parse_time_fn(const nlohmann::json& j, bool is_omega) {
    std::string name;
    Vec3 value;
    bool has_value = false;
    if (j.is_string()) {
        name = j.get<std::string>();
    } else if (j.is_object()) {
        name = j.at("name").get<std::string>();
        if (j.contains("value")) {
            value = json_vec3(j["value"]);
            has_value = true;
        }
    } else {
        throw LoomError(ErrorCode::BadConfig, "time function must be a name or {name, value}");
    }
    if (name == "paper") {
        return is_omega ? std::function<Vec3(double)>(paper_omega_fn)
                        : std::function<Vec3(double)>(paper_t_fn);
    }
    if (name == "constant") {
        if (!has_value) {
            throw LoomError(ErrorCode::BadConfig, "constant time function needs a value");
        }
        return [value](double) { return value; };
    }
    throw LoomError(ErrorCode::BadConfig, "unknown time function '" + name + "'");
}

Vec3 parse_signs(const nlohmann::json& j, const char* key) {
    const Vec3 v = json_vec3(j);
    if ((std::abs(v.x) != 1.0) || (std::abs(v.y) != 1.0) || (std::abs(v.z) != 1.0)) {
        throw LoomError(ErrorCode::BadConfig, std::string(key) + " components must be +1 or -1");
    }
    return v;
}

}  // namespace

SimConfig default_paper_config() {
    SimConfig config;
    config.duration = 23.0;
    config.rate = 60.0;
    config.start_pos = {-75.0, 75.0, 44.3};
    config.start_orient = Mat3::from_columns({0, -1, 0}, {1, 0, 0}, {0, 0, 1});
    config.patch = {{80.0, -40.0, 40.0}, {80.0, -80.0, 35.0}, {85.0, -60.0, 58.0}};
    config.t_fn = paper_t_fn;
    config.omega_fn = paper_omega_fn;
    config.tracked_point_mode = TrackedPointMode::Custom;
    config.tracked_point = {81.25, -45.0, 44.5};
    config.frame = MotionFrame::Body;
    config.omega_ij_unit = OmegaIjUnit::DegPerSec;
    config.axis_signs_t = {1, 1, -1};
    config.axis_signs_omega = {-1, -1, 1};
    return config;
}

Vec3 tracked_point(const SimConfig& config) {
    switch (config.tracked_point_mode) {
        case TrackedPointMode::Centroid:
            return (config.patch.a + config.patch.b + config.patch.c) / 3.0;
        case TrackedPointMode::VertexA:
            return config.patch.a;
        case TrackedPointMode::Custom:
            break;
    }
    return config.tracked_point;
}

std::vector<SimRecord> run(const SimConfig& config) {
    if (!(config.duration > 0.0) || !(config.rate > 0.0)) {
        throw LoomError(ErrorCode::BadConfig, "duration and rate must be positive");
    }
    if (!config.t_fn || !config.omega_fn) {
        throw LoomError(ErrorCode::BadConfig, "t_fn and omega_fn must be set");
    }
    patch_normal(config.patch);  // validates the triangle up front
    const Vec3 target = tracked_point(config);
    const int n = static_cast<int>(std::lround(config.duration * config.rate));
    if (n < 2) {
        throw LoomError(ErrorCode::BadConfig, "need at least two samples");
    }
    const double h = 1.0 / config.rate;

    std::vector<SimRecord> records(n);
    Vec3 pos = config.start_pos;
    Mat3 orient = config.start_orient.orthonormalized();

    for (int k = 0; k < n; ++k) {
        const double time = k * h;
        SimRecord& rec = records[k];
        rec.time = time;

        const Rates rates = effective_rates(config, time);
        MotionState cam_state;
        if (config.frame == MotionFrame::Body) {
            cam_state = {rates.t, rates.omega};
        } else {
            cam_state = {orient.tapply(rates.t), orient.tapply(rates.omega)};
        }

        try {
            const Vec3 n_world = patch_normal(config.patch, pos);
            const Vec3 n_cam = orient.tapply(n_world);
            const double c = n_cam.dot(orient.tapply(config.patch.a - pos));
            const Direction dir = cart_to_spherical(orient.tapply(target - pos)).dir;
            const PlaneSceneSample sample = plane_scene_sample(n_cam, c, dir, cam_state);
            rec.r = sample.r;
            rec.l_true = sample.comps.t_r / sample.r;
            rec.l1 = looming_est1(sample.partials, sample.field).value;
            rec.l2 = looming_est2(sample.partials).value;
            rec.gamma = sample.tilt.gamma;
            rec.delta = sample.tilt.delta;
            rec.theta_dot = sample.field.theta_dot;
            rec.phi_dot = sample.field.phi_dot;
            if (std::abs(rec.l_true) <= kErrorFloorDefault) {
                rec.err_flagged = true;
                rec.err1 = kNan;
                rec.err2 = kNan;
            } else {
                rec.err1 = error_percent(rec.l1, rec.l_true);
                rec.err2 = error_percent(rec.l2, rec.l_true);
            }
        } catch (const LoomError&) {
            rec.geometry_flagged = true;
            rec.err_flagged = true;
            rec.r = rec.l_true = rec.l1 = rec.l2 = kNan;
            rec.err1 = rec.err2 = rec.gamma = rec.delta = kNan;
            rec.theta_dot = rec.phi_dot = kNan;
        }

        const PoseDeriv d1 = pose_deriv(config, time, orient);
        const PoseDeriv d2 =
            pose_deriv(config, time + 0.5 * h, (orient + d1.rdot * (0.5 * h)).orthonormalized());
        const PoseDeriv d3 =
            pose_deriv(config, time + 0.5 * h, (orient + d2.rdot * (0.5 * h)).orthonormalized());
        const PoseDeriv d4 = pose_deriv(config, time + h, (orient + d3.rdot * h).orthonormalized());
        pos += (d1.v + d2.v * 2.0 + d3.v * 2.0 + d4.v) * (h / 6.0);
        orient = (orient + (d1.rdot + d2.rdot * 2.0 + d3.rdot * 2.0 + d4.rdot) * (h / 6.0))
                     .orthonormalized();
    }

    for (int k = 0; k < n; ++k) {
        SimRecord& rec = records[k];
        if (k + 1 < n && !rec.geometry_flagged && !records[k + 1].geometry_flagged) {
            rec.l_discrete = looming_discrete(rec.r, records[k + 1].r, h);
        } else {
            rec.l_discrete = kNan;
        }
    }
    return records;
}

void export_csv(const std::vector<SimRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw LoomError(ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    out << kCsvHeader << '\n';
    for (const SimRecord& rec : records) {
        out << fmt_full(rec.time) << ',' << fmt_full(rec.r) << ',' << fmt_full(rec.l_true) << ','
            << fmt_full(rec.l1) << ',' << fmt_full(rec.l2) << ','
            << fmt_full(rec.err_flagged ? kNan : rec.err1) << ','
            << fmt_full(rec.err_flagged ? kNan : rec.err2) << ',' << fmt_full(rec.gamma) << ','
            << fmt_full(rec.delta) << '\n';
    }
    if (!out.good()) {
        throw LoomError(ErrorCode::IoError, "short write to " + path);
    }
}

std::vector<SimRecord> import_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoomError(ErrorCode::IoError, "cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw LoomError(ErrorCode::TruncatedFile, "empty csv " + path);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kCsvHeader) {
        throw LoomError(ErrorCode::BadMagic, "unexpected csv header in " + path);
    }
    std::vector<SimRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::array<double, 9> f{};
        std::size_t start = 0;
        int idx = 0;
        while (idx < 9) {
            const std::size_t comma = line.find(',', start);
            const std::string token = line.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            f[idx++] = parse_field(token, path);
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (idx != 9) {
            throw LoomError(ErrorCode::TruncatedFile,
                            "csv row with " + std::to_string(idx) + " fields in " + path);
        }
        SimRecord rec;
        rec.time = f[0];
        rec.r = f[1];
        rec.l_true = f[2];
        rec.l1 = f[3];
        rec.l2 = f[4];
        rec.err1 = f[5];
        rec.err2 = f[6];
        rec.gamma = f[7];
        rec.delta = f[8];
        rec.err_flagged = std::isnan(f[5]) || std::isnan(f[6]);
        rec.geometry_flagged = std::isnan(f[1]);
        rec.l_discrete = kNan;
        records.push_back(rec);
    }
    return records;
}

SimConfig load_sim_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw LoomError(ErrorCode::IoError, "cannot open " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw LoomError(ErrorCode::BadConfig, std::string("json parse: ") + e.what());
    }

    SimConfig config = default_paper_config();
    try {
        if (j.contains("duration")) {
            config.duration = j["duration"].get<double>();
        }
        if (j.contains("rate")) {
            config.rate = j["rate"].get<double>();
        }
        if (j.contains("start_pos")) {
            config.start_pos = json_vec3(j["start_pos"]);
        }
        if (j.contains("start_orient")) {
            const nlohmann::json& o = j["start_orient"];
            config.start_orient = Mat3::from_columns(json_vec3(o.at("forward")),
                                                     json_vec3(o.at("left")), json_vec3(o.at("up")));
        }
        if (j.contains("patch")) {
            const nlohmann::json& p = j["patch"];
            config.patch = {json_vec3(p.at("a")), json_vec3(p.at("b")), json_vec3(p.at("c"))};
        }
        if (j.contains("t_fn")) {
            config.t_fn = parse_time_fn(j["t_fn"], false);
        }
        if (j.contains("omega_fn")) {
            config.omega_fn = parse_time_fn(j["omega_fn"], true);
        }
        if (j.contains("tracked_point_mode")) {
            const std::string mode = j["tracked_point_mode"].get<std::string>();
            if (mode == "centroid") {
                config.tracked_point_mode = TrackedPointMode::Centroid;
            } else if (mode == "vertex_a") {
                config.tracked_point_mode = TrackedPointMode::VertexA;
            } else if (mode == "custom") {
                config.tracked_point_mode = TrackedPointMode::Custom;
            } else {
                throw LoomError(ErrorCode::BadConfig, "unknown tracked_point_mode '" + mode + "'");
            }
        }
        if (j.contains("tracked_point")) {
            config.tracked_point = json_vec3(j["tracked_point"]);
        }
        if (j.contains("frame")) {
            const std::string frame = j["frame"].get<std::string>();
            if (frame == "body") {
                config.frame = MotionFrame::Body;
            } else if (frame == "world") {
                config.frame = MotionFrame::World;
            } else {
                throw LoomError(ErrorCode::BadConfig, "unknown frame '" + frame + "'");
            }
        }
        if (j.contains("omega_ij_unit")) {
            const std::string unit = j["omega_ij_unit"].get<std::string>();
            if (unit == "rad_per_sec") {
                config.omega_ij_unit = OmegaIjUnit::RadPerSec;
            } else if (unit == "deg_per_sec") {
                config.omega_ij_unit = OmegaIjUnit::DegPerSec;
            } else {
                throw LoomError(ErrorCode::BadConfig, "unknown omega_ij_unit '" + unit + "'");
            }
        }
        if (j.contains("axis_signs_t")) {
            config.axis_signs_t = parse_signs(j["axis_signs_t"], "axis_signs_t");
        }
        if (j.contains("axis_signs_omega")) {
            config.axis_signs_omega = parse_signs(j["axis_signs_omega"], "axis_signs_omega");
        }
    } catch (const LoomError&) {
        throw;
    } catch (const std::exception& e) {
        throw LoomError(ErrorCode::BadConfig, e.what());
    }

    if (!(config.duration > 0.0) || !(config.rate > 0.0)) {
        throw LoomError(ErrorCode::BadConfig, "duration and rate must be positive");
    }
    patch_normal(config.patch);  // throws DegeneratePatch on a collinear triangle
    const Mat3 ortho = config.start_orient.orthonormalized();
    const double det = ortho.c0.cross(ortho.c1).dot(ortho.c2);
    if (!std::isfinite(det) || det < 0.5) {
        throw LoomError(ErrorCode::BadConfig, "start_orient must be a right-handed basis");
    }
    return config;
}

std::string describe_interpretation(const SimConfig& config) {
    std::ostringstream os;
    os << "frame=" << (config.frame == MotionFrame::Body ? "body" : "world")
       << " omega_ij_unit="
       << (config.omega_ij_unit == OmegaIjUnit::DegPerSec ? "deg_per_sec" : "rad_per_sec")
       << " axis_signs_t=" << fmt_vec(config.axis_signs_t)
       << " axis_signs_omega=" << fmt_vec(config.axis_signs_omega)
       << " forward=" << fmt_vec(config.start_orient.c0)
       << " left=" << fmt_vec(config.start_orient.c1) << " up=" << fmt_vec(config.start_orient.c2)
       << " tracked=" << fmt_vec(tracked_point(config));
    return os.str();
}

}  // namespace loomkit
