#include "loomkit/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "loomkit/errors.hpp"
#include "loomkit/parallel.hpp"

namespace loomkit {

namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxPixels = 100'000'000;

bool flow_value_known(float u, float v) {
    return std::isfinite(u) && std::isfinite(v) && std::abs(u) < kFlowUnknownThreshold &&
           std::abs(v) < kFlowUnknownThreshold;
}

void check_grid_size(int width, int height) {
    if (width <= 0 || height <= 0 ||
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height) > kMaxPixels) {
        throw LoomError(ErrorCode::IoError, "implausible grid dimensions " +
                                                std::to_string(width) + "x" +
                                                std::to_string(height));
    }
}

std::string fmt_full(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Vec3 json_vec3(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw LoomError(ErrorCode::BadConfig, "expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json parse_json_file(const std::string& path) {
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
    return j;
}

// Median of |values| restricted to a mask; 0 for an empty selection.
double masked_abs_median(const std::vector<double>& values, const std::vector<uint8_t>& mask) {
    std::vector<double> mag;
    mag.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (mask[i]) {
            mag.push_back(std::abs(values[i]));
        }
    }
    if (mag.empty()) {
        return 0.0;
    }
    const std::size_t mid = mag.size() / 2;
    std::nth_element(mag.begin(), mag.begin() + mid, mag.end());
    return mag[mid];
}

uint8_t saturate_channel(double l, double top) {
    const double scaled = 255.0 * std::min(l / top, 1.0);
    return static_cast<uint8_t>(std::lround(std::max(scaled, 0.0)));
}

uint8_t zone_channel(double magnitude, const std::array<double, 3>& th) {
    if (magnitude >= th[2]) {
        return 255;
    }
    if (magnitude >= th[1]) {
        return 191;
    }
    if (magnitude >= th[0]) {
        return 127;
    }
    return 63;
}

}  // namespace

DenseFlow load_flo(const std::string& path, double dt) {
    if (dt <= 0.0) {
        throw LoomError(ErrorCode::NonPositiveDt, "flow interval must be positive");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoomError(ErrorCode::IoError, "cannot open " + path);
    }
    float magic = 0.0f;
    if (!in.read(reinterpret_cast<char*>(&magic), sizeof magic)) {
        throw LoomError(ErrorCode::TruncatedFile, "missing magic in " + path);
    }
    if (magic != kFloMagic) {
        throw LoomError(ErrorCode::BadMagic, "not a flow file: " + path);
    }
    int32_t width = 0;
    int32_t height = 0;
    if (!in.read(reinterpret_cast<char*>(&width), sizeof width) ||
        !in.read(reinterpret_cast<char*>(&height), sizeof height)) {
        throw LoomError(ErrorCode::TruncatedFile, "missing dimensions in " + path);
    }
    check_grid_size(width, height);

    DenseFlow flow;
    flow.width = width;
    flow.height = height;
    flow.dt = dt;
    const std::size_t count = static_cast<std::size_t>(width) * height;
    flow.u.resize(count);
    flow.v.resize(count);
    flow.valid.resize(count);
    std::vector<float> packed(count * 2);
    if (!in.read(reinterpret_cast<char*>(packed.data()),
                 static_cast<std::streamsize>(packed.size() * sizeof(float)))) {
        throw LoomError(ErrorCode::TruncatedFile, "flow payload short in " + path);
    }
    // anything past the payload is garbage, not padding
    char extra = 0;
    if (in.read(&extra, 1)) {
        throw LoomError(ErrorCode::TruncatedFile, "trailing bytes after flow payload in " + path);
    }
    for (std::size_t i = 0; i < count; ++i) {
        flow.u[i] = packed[2 * i];
        flow.v[i] = packed[2 * i + 1];
        flow.valid[i] = flow_value_known(flow.u[i], flow.v[i]) ? 1 : 0;
    }
    return flow;
}

void write_flo(const DenseFlow& flow, const std::string& path) {
    check_grid_size(flow.width, flow.height);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw LoomError(ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    const float magic = kFloMagic;
    const int32_t width = flow.width;
    const int32_t height = flow.height;
    out.write(reinterpret_cast<const char*>(&magic), sizeof magic);
    out.write(reinterpret_cast<const char*>(&width), sizeof width);
    out.write(reinterpret_cast<const char*>(&height), sizeof height);
    const std::size_t count = static_cast<std::size_t>(flow.width) * flow.height;
    std::vector<float> packed(count * 2);
    for (std::size_t i = 0; i < count; ++i) {
        packed[2 * i] = flow.u[i];
        packed[2 * i + 1] = flow.v[i];
    }
    out.write(reinterpret_cast<const char*>(packed.data()),
              static_cast<std::streamsize>(packed.size() * sizeof(float)));
    if (!out.good()) {
        throw LoomError(ErrorCode::IoError, "short write to " + path);
    }
}

AngularRateGrids flow_to_angular_rates(const DenseFlow& flow, const CameraIntrinsics& intr) {
    if (intr.width != flow.width || intr.height != flow.height) {
        throw LoomError(ErrorCode::DimensionMismatch, "intrinsics dimensions do not match flow");
    }
    if (flow.dt <= 0.0) {
        throw LoomError(ErrorCode::NonPositiveDt, "flow interval must be positive");
    }
    AngularRateGrids g;
    g.width = flow.width;
    g.height = flow.height;
    const std::size_t count = static_cast<std::size_t>(flow.width) * flow.height;
    g.theta.assign(count, kNan);
    g.phi.assign(count, kNan);
    g.theta_dot.assign(count, kNan);
    g.phi_dot.assign(count, kNan);
    g.valid.assign(count, 0);

    parallel_rows(flow.height, [&](int row_begin, int row_end) {
        for (int row = row_begin; row < row_end; ++row) {
            for (int col = 0; col < flow.width; ++col) {
                const std::size_t i = flow.index(row, col);
                Direction d1;
                try {
                    d1 = pixel_to_direction({static_cast<double>(col), static_cast<double>(row)},
                                            intr);
                } catch (const LoomError&) {
                    continue;  // degenerate intrinsics at this pixel
                }
                g.theta[i] = d1.theta;
                g.phi[i] = d1.phi;
                if (!flow.valid[i]) {
                    continue;
                }
                // Promote before adding: int + float would round the sum to
                // float and quantize sub-pixel displacements.
                const double dest_col = col + static_cast<double>(flow.u[i]);
                const double dest_row = row + static_cast<double>(flow.v[i]);
                if (dest_col < 0.0 || dest_col > flow.width - 1 || dest_row < 0.0 ||
                    dest_row > flow.height - 1) {
                    continue;  // displaced position exits the image
                }
                Direction d2;
                try {
                    d2 = pixel_to_direction({dest_col, dest_row}, intr);
                } catch (const LoomError&) {
                    continue;
                }
                g.theta_dot[i] = (d2.theta - d1.theta) / flow.dt;
                g.phi_dot[i] = (d2.phi - d1.phi) / flow.dt;
                g.valid[i] = 1;
            }
        }
    });
    return g;
}

DenseFlow box_prefilter3(const DenseFlow& flow) {
    DenseFlow out = flow;
    parallel_rows(flow.height, [&](int row_begin, int row_end) {
        for (int row = row_begin; row < row_end; ++row) {
            for (int col = 0; col < flow.width; ++col) {
                const std::size_t i = flow.index(row, col);
                if (!flow.valid[i]) {
                    continue;
                }
                double su = 0.0;
                double sv = 0.0;
                int n = 0;
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int r = row + dr;
                        const int c = col + dc;
                        if (r < 0 || r >= flow.height || c < 0 || c >= flow.width) {
                            continue;
                        }
                        const std::size_t k = flow.index(r, c);
                        if (!flow.valid[k]) {
                            continue;
                        }
                        su += flow.u[k];
                        sv += flow.v[k];
                        ++n;
                    }
                }
                out.u[i] = static_cast<float>(su / n);
                out.v[i] = static_cast<float>(sv / n);
            }
        }
    });
    return out;
}

PartialGrids spatial_partials(const AngularRateGrids& g) {
    PartialGrids p;
    p.width = g.width;
    p.height = g.height;
    const std::size_t count = static_cast<std::size_t>(g.width) * g.height;
    p.dtheta_dot_dtheta.assign(count, kNan);
    p.dphi_dot_dphi.assign(count, kNan);
    p.valid_theta.assign(count, 0);
    p.valid_phi.assign(count, 0);

    parallel_rows(g.height, [&](int row_begin, int row_end) {
        for (int row = row_begin; row < row_end; ++row) {
            for (int col = 0; col < g.width; ++col) {
                const std::size_t i = g.index(row, col);
                if (!g.valid[i]) {
                    continue;
                }
                if (g.width >= 2) {
                    const int c1 = col == 0 ? 0 : col - 1;
                    const int c2 = col == g.width - 1 ? col : col + 1;
                    const std::size_t i1 = g.index(row, c1);
                    const std::size_t i2 = g.index(row, c2);
                    if (g.valid[i1] && g.valid[i2]) {
                        const double denom = g.theta[i2] - g.theta[i1];
                        if (std::abs(denom) >= 1e-12) {
                            p.dtheta_dot_dtheta[i] = (g.theta_dot[i2] - g.theta_dot[i1]) / denom;
                            p.valid_theta[i] = 1;
                        }
                    }
                }
                if (g.height >= 2) {
                    const int r1 = row == 0 ? 0 : row - 1;
                    const int r2 = row == g.height - 1 ? row : row + 1;
                    const std::size_t i1 = g.index(r1, col);
                    const std::size_t i2 = g.index(r2, col);
                    if (g.valid[i1] && g.valid[i2]) {
                        const double denom = g.phi[i2] - g.phi[i1];
                        if (std::abs(denom) >= 1e-12) {
                            p.dphi_dot_dphi[i] = (g.phi_dot[i2] - g.phi_dot[i1]) / denom;
                            p.valid_phi[i] = 1;
                        }
                    }
                }
            }
        }
    });
    return p;
}

std::vector<uint8_t> edge_flags(const PartialGrids& p, double multiple) {
    const double med_theta = masked_abs_median(p.dtheta_dot_dtheta, p.valid_theta);
    const double med_phi = masked_abs_median(p.dphi_dot_dphi, p.valid_phi);
    std::vector<uint8_t> flags(p.dtheta_dot_dtheta.size(), 0);
    for (std::size_t i = 0; i < flags.size(); ++i) {
        const bool spike_theta =
            p.valid_theta[i] && std::abs(p.dtheta_dot_dtheta[i]) > multiple * med_theta;
        const bool spike_phi = p.valid_phi[i] && std::abs(p.dphi_dot_dphi[i]) > multiple * med_phi;
        flags[i] = (spike_theta || spike_phi) ? 1 : 0;
    }
    return flags;
}

LoomingMap looming_map(const AngularRateGrids& g, const PartialGrids& p, LoomingKind mode) {
    if (g.width != p.width || g.height != p.height) {
        throw LoomError(ErrorCode::DimensionMismatch, "rate and partial grids do not align");
    }
    if (mode != LoomingKind::Est1 && mode != LoomingKind::Est2 && mode != LoomingKind::EstAvg) {
        throw LoomError(ErrorCode::BadConfig, "looming map mode must be Est1, Est2 or EstAvg");
    }
    LoomingMap m;
    m.width = g.width;
    m.height = g.height;
    m.provenance = mode;
    const std::size_t count = static_cast<std::size_t>(g.width) * g.height;
    m.l.assign(count, kNan);
    m.valid.assign(count, 0);

    parallel_rows(g.height, [&](int row_begin, int row_end) {
        for (int row = row_begin; row < row_end; ++row) {
            for (int col = 0; col < g.width; ++col) {
                const std::size_t i = g.index(row, col);
                if (!g.valid[i]) {
                    continue;
                }
                PartialsSample ps;
                ps.dtheta_dot_dtheta = p.valid_theta[i] ? p.dtheta_dot_dtheta[i] : kNan;
                ps.dphi_dot_dphi = p.valid_phi[i] ? p.dphi_dot_dphi[i] : kNan;
                FieldSample fs;
                fs.dir = {g.theta[i], g.phi[i]};
                fs.theta_dot = g.theta_dot[i];
                fs.phi_dot = g.phi_dot[i];
                const bool has_theta = p.valid_theta[i] != 0;
                const bool has_phi = p.valid_phi[i] != 0;
                try {
                    switch (mode) {
                        case LoomingKind::Est1:
                            if (has_theta) {
                                m.l[i] = looming_est1(ps, fs).value;
                                m.valid[i] = 1;
                            }
                            break;
                        case LoomingKind::Est2:
                            if (has_phi) {
                                m.l[i] = looming_est2(ps).value;
                                m.valid[i] = 1;
                            }
                            break;
                        default:
                            if (has_theta && has_phi) {
                                m.l[i] = looming_est_avg(ps, fs).value;
                                m.valid[i] = 1;
                            }
                            break;
                    }
                } catch (const LoomError&) {
                    m.l[i] = kNan;
                    m.valid[i] = 0;
                }
            }
        }
    });
    return m;
}

DenseFlow synth_flow(const PlanarPatch& plane, const MotionState& state,
                     const CameraIntrinsics& intr, double dt) {
    if (dt <= 0.0) {
        throw LoomError(ErrorCode::NonPositiveDt, "flow interval must be positive");
    }
    check_grid_size(intr.width, intr.height);
    const Vec3 n = patch_normal(plane);  // throws DegeneratePatch
    const double c = n.dot(plane.a);
    const Mat3 rot = Mat3::rotation(state.omega * -dt);
    const Vec3 shift = state.t * dt;

    DenseFlow flow;
    flow.width = intr.width;
    flow.height = intr.height;
    flow.dt = dt;
    const std::size_t count = static_cast<std::size_t>(intr.width) * intr.height;
    flow.u.assign(count, kFlowUnknown);
    flow.v.assign(count, kFlowUnknown);
    flow.valid.assign(count, 0);

    parallel_rows(intr.height, [&](int row_begin, int row_end) {
        for (int row = row_begin; row < row_end; ++row) {
            for (int col = 0; col < intr.width; ++col) {
                const std::size_t i = flow.index(row, col);
                try {
                    const Direction dir = pixel_to_direction(
                        {static_cast<double>(col), static_cast<double>(row)}, intr);
                    const Vec3 e_r = frame_at(dir).e_r;
                    const double denom = n.dot(e_r);
                    if (std::abs(denom) <= 1e-9) {
                        continue;  // ray parallel to the plane
                    }
                    const double r = c / denom;
                    if (r <= 0.0) {
                        continue;  // plane behind the camera along this ray
                    }
                    const Vec3 moved = rot * (e_r * r - shift);
                    const Pixel dest = direction_to_pixel(cart_to_spherical(moved).dir, intr);
                    flow.u[i] = static_cast<float>(dest.col - col);
                    flow.v[i] = static_cast<float>(dest.row - row);
                    flow.valid[i] = 1;
                } catch (const LoomError&) {
                    // pixel stays masked
                }
            }
        }
    });
    return flow;
}

void render_threat_map(const LoomingMap& m, const std::array<double, 3>& thresholds,
                       const std::string& path, bool zone_overlay) {
    if (!(thresholds[0] < thresholds[1] && thresholds[1] < thresholds[2])) {
        throw LoomError(ErrorCode::BadThresholds, "thresholds must be strictly increasing");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw LoomError(ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    out << "P6\n" << m.width << ' ' << m.height << "\n255\n";
    std::vector<uint8_t> rgb(static_cast<std::size_t>(m.width) * m.height * 3, 0);
    for (std::size_t i = 0; i < m.l.size(); ++i) {
        uint8_t* px = &rgb[i * 3];
        if (!m.valid[i]) {
            px[0] = px[1] = px[2] = 128;
            continue;
        }
        const double l = m.l[i];
        if (l > 0.0) {
            px[0] = zone_overlay ? zone_channel(l, thresholds) : saturate_channel(l, thresholds[2]);
        } else if (l < 0.0) {
            px[2] = zone_overlay ? zone_channel(-l, thresholds)
                                 : saturate_channel(-l, thresholds[2]);
        }
    }
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!out.good()) {
        throw LoomError(ErrorCode::IoError, "short write to " + path);
    }
}

void write_map_csv(const LoomingMap& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw LoomError(ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    for (int row = 0; row < m.height; ++row) {
        for (int col = 0; col < m.width; ++col) {
            const std::size_t i = m.index(row, col);
            if (col > 0) {
                out << ',';
            }
            out << (m.valid[i] ? fmt_full(m.l[i]) : "nan");
        }
        out << '\n';
    }
    if (!out.good()) {
        throw LoomError(ErrorCode::IoError, "short write to " + path);
    }
}

CameraIntrinsics load_intrinsics_json(const std::string& path) {
    const nlohmann::json j = parse_json_file(path);
    CameraIntrinsics intr;
    try {
        intr.fx = j.at("fx").get<double>();
        intr.fy = j.at("fy").get<double>();
        intr.cx = j.at("cx").get<double>();
        intr.cy = j.at("cy").get<double>();
        intr.width = j.at("width").get<int>();
        intr.height = j.at("height").get<int>();
    } catch (const std::exception& e) {
        throw LoomError(ErrorCode::BadConfig, std::string("intrinsics: ") + e.what());
    }
    if (!(intr.fx > 0.0) || !(intr.fy > 0.0) || intr.width <= 0 || intr.height <= 0) {
        throw LoomError(ErrorCode::BadConfig,
                        "intrinsics need positive fx, fy, width and height");
    }
    return intr;
}

MotionState load_motion_json(const std::string& path) {
    const nlohmann::json j = parse_json_file(path);
    MotionState state;
    try {
        if (j.contains("t")) {
            state.t = json_vec3(j["t"]);
        }
        if (j.contains("omega")) {
            state.omega = json_vec3(j["omega"]);
        }
    } catch (const LoomError&) {
        throw;
    } catch (const std::exception& e) {
        throw LoomError(ErrorCode::BadConfig, std::string("motion: ") + e.what());
    }
    return state;
}

PlanarPatch load_patch_json(const std::string& path) {
    const nlohmann::json j = parse_json_file(path);
    try {
        return {json_vec3(j.at("a")), json_vec3(j.at("b")), json_vec3(j.at("c"))};
    } catch (const LoomError&) {
        throw;
    } catch (const std::exception& e) {
        throw LoomError(ErrorCode::BadConfig, std::string("patch: ") + e.what());
    }
}

}  // namespace loomkit
