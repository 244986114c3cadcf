#include "loomkit/spherical.hpp"

#include <cmath>

namespace loomkit {

namespace {
constexpr double kHalfPi = 1.57079632679489661923;
}

Frame frame_at(const Direction& dir) {
    const double ct = std::cos(dir.theta);
    const double st = std::sin(dir.theta);
    const double cp = std::cos(dir.phi);
    const double sp = std::sin(dir.phi);
    Frame f;
    f.e_r = {cp * ct, cp * st, sp};
    f.e_theta = {-st, ct, 0.0};
    f.e_phi = {-sp * ct, -sp * st, cp};
    return f;
}

Spherical cart_to_spherical(const Vec3& v) {
    const double r = v.norm();
    if (r <= 0.0) {
        throw LoomError(ErrorCode::ZeroVector, "cannot take the direction of a zero vector");
    }
    const double sin_phi = v.z / r;
    const double phi = std::asin(sin_phi < -1.0 ? -1.0 : (sin_phi > 1.0 ? 1.0 : sin_phi));
    if (std::abs(phi) > kHalfPi - kPolarGuard) {
        throw LoomError(ErrorCode::PolarSingularity, "direction too close to the +-z axis");
    }
    return {r, {std::atan2(v.y, v.x), phi}};
}

Direction pixel_to_direction(const Pixel& px, const CameraIntrinsics& intr) {
    if (px.col < 0.0 || px.col > intr.width - 1 || px.row < 0.0 || px.row > intr.height - 1) {
        throw LoomError(ErrorCode::OutOfBounds, "pixel outside image bounds");
    }
    const Vec3 ray{1.0, -(px.col - intr.cx) / intr.fx, -(px.row - intr.cy) / intr.fy};
    return cart_to_spherical(ray).dir;
}

Pixel direction_to_pixel(const Direction& dir, const CameraIntrinsics& intr) {
    const Vec3 e_r = frame_at(dir).e_r;
    if (e_r.x <= 0.0) {
        throw LoomError(ErrorCode::BehindCamera, "direction has non-positive optical-axis component");
    }
    return {intr.cx - intr.fx * (e_r.y / e_r.x), intr.cy - intr.fy * (e_r.z / e_r.x)};
}

}  // namespace loomkit
