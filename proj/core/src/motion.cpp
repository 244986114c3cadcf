#include "loomkit/motion.hpp"

#include <cmath>

namespace loomkit {

Vec3 relative_velocity(const MotionState& state, const Vec3& r_vec) {
    return -state.t - state.omega.cross(r_vec);
}

SphericalMotionComponents decompose(const MotionState& state, const Direction& dir) {
    const Frame f = frame_at(dir);
    SphericalMotionComponents c;
    c.t_r = state.t.dot(f.e_r);
    c.t_theta = state.t.dot(f.e_theta);
    c.t_phi = state.t.dot(f.e_phi);
    c.omega_r = state.omega.dot(f.e_r);
    c.omega_theta = state.omega.dot(f.e_theta);
    c.omega_phi = state.omega.dot(f.e_phi);
    return c;
}

FieldSample field_sample(const MotionState& state, const Vec3& r_vec) {
    const Spherical sph = cart_to_spherical(r_vec);
    const SphericalMotionComponents c = decompose(state, sph.dir);
    const double inv_r = 1.0 / sph.r;
    FieldSample s;
    s.dir = sph.dir;
    s.r_dot_over_r = -c.t_r * inv_r;
    s.theta_dot = (-c.t_theta * inv_r - c.omega_phi) / std::cos(sph.dir.phi);
    s.phi_dot = -c.t_phi * inv_r + c.omega_theta;
    return s;
}

}  // namespace loomkit
