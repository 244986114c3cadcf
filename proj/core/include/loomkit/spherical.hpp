#pragma once

#include "loomkit/errors.hpp"
#include "loomkit/vec3.hpp"

namespace loomkit {

// Guard band around the poles: tan(phi) and 1/cos(phi) must stay finite.
inline constexpr double kPolarGuard = 1e-6;

// Viewing direction in camera axes: x = optical axis, y = left, z = up.
// theta is azimuth from the x-axis (positive toward +y), phi is elevation
// from the xy-plane (positive toward +z).
struct Direction {
    double theta = 0.0;  // rad, (-pi, pi]
    double phi = 0.0;    // rad, (-pi/2, pi/2) strictly
};

// Orthonormal right-handed frame attached to a viewing direction.
struct Frame {
    Vec3 e_r;
    Vec3 e_theta;
    Vec3 e_phi;
};

struct CameraIntrinsics {
    double fx = 0.0;  // px
    double fy = 0.0;  // px
    double cx = 0.0;  // px
    double cy = 0.0;  // px
    int width = 0;    // px
    int height = 0;   // px
};

struct Spherical {
    double r = 0.0;  // m
    Direction dir;
};

struct Pixel {
    double col = 0.0;
    double row = 0.0;
};

// Unit-vector frame at a direction:
//   e_r     = (cos(phi)cos(theta), cos(phi)sin(theta), sin(phi))
//   e_theta = (-sin(theta), cos(theta), 0)
//   e_phi   = (-sin(phi)cos(theta), -sin(phi)sin(theta), cos(phi))
Frame frame_at(const Direction& dir);

// r = |v|, direction such that v = r * e_r(dir).
// Throws ZeroVector for |v| = 0 and PolarSingularity near the +-z axis.
Spherical cart_to_spherical(const Vec3& v);

// Pixel (col,row) -> viewing direction through ray
// (1, -(col-cx)/fx, -(row-cy)/fy): columns grow rightward (-y), rows grow
// downward (-z). Throws OutOfBounds outside [0,w-1]x[0,h-1].
Direction pixel_to_direction(const Pixel& px, const CameraIntrinsics& intr);

// Exact inverse of pixel_to_direction; result may land outside the image
// bounds (callers clip). Throws BehindCamera when the ray x-component <= 0.
Pixel direction_to_pixel(const Direction& dir, const CameraIntrinsics& intr);

inline bool direction_valid(const Direction& dir) {
    return dir.theta > -3.14159265358979323846 - 1e-12 &&
           dir.theta <= 3.14159265358979323846 + 1e-12 &&
           std::abs(dir.phi) < 1.57079632679489661923 - kPolarGuard;
}

}  // namespace loomkit
