#pragma once

#include <optional>

#include "loomkit/spherical.hpp"
#include "loomkit/vec3.hpp"

namespace loomkit {

// Instantaneous camera translation and rotation, expressed in camera axes.
struct MotionState {
    Vec3 t;      // m/s
    Vec3 omega;  // rad/s
};

// Projections of t and omega onto the (e_r, e_theta, e_phi) frame.
struct SphericalMotionComponents {
    double t_r = 0.0;
    double t_theta = 0.0;
    double t_phi = 0.0;
    double omega_r = 0.0;
    double omega_theta = 0.0;
    double omega_phi = 0.0;
};

// Motion-field values for one viewing direction. r_dot_over_r is only
// present when the range is known (analytic scenes); flow-derived samples
// leave it empty.
struct FieldSample {
    Direction dir;
    double theta_dot = 0.0;  // rad/s
    double phi_dot = 0.0;    // rad/s
    std::optional<double> r_dot_over_r;  // 1/s
};

// Velocity of a stationary scene point relative to the camera: -t - omega x r.
Vec3 relative_velocity(const MotionState& state, const Vec3& r_vec);

SphericalMotionComponents decompose(const MotionState& state, const Direction& dir);

// Angular rates of a stationary point at r_vec:
//   r_dot/r = -t_r/r,  theta_dot = (-t_theta/r - omega_phi)/cos(phi),
//   phi_dot = -t_phi/r + omega_theta.
// Throws PolarSingularity (via cart_to_spherical) near the poles.
FieldSample field_sample(const MotionState& state, const Vec3& r_vec);

}  // namespace loomkit
