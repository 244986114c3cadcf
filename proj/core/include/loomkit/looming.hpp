#pragma once

#include <optional>

#include "loomkit/motion.hpp"
#include "loomkit/vec3.hpp"

namespace loomkit {

// error_percent refuses ground truth below this floor; the relative error
// metric has a pole at L = 0.
inline constexpr double kErrorFloorDefault = 1e-6;  // 1/s

// Logarithmic range slopes (1/r)(dr/dtheta), (1/r)(dr/dphi), units 1/rad.
struct LogRangePartials {
    double d_theta = 0.0;
    double d_phi = 0.0;
};

// Spatial partial derivatives of the motion field at one direction. The
// range-free estimators need only the first two; the exact forms and the
// rotation recovery need the optional range-dependent extras.
struct PartialsSample {
    double dtheta_dot_dtheta = 0.0;  // 1/s
    double dphi_dot_dphi = 0.0;      // 1/s
    double dphi_dot_dtheta = 0.0;    // 1/s
    double dtheta_dot_dphi = 0.0;    // 1/s
    std::optional<double> dr_dot_dtheta;  // m/s per rad
    std::optional<double> dr_dot_dphi;    // m/s per rad
    std::optional<LogRangePartials> log_range_partials;
};

enum class LoomingKind {
    GroundTruth,
    ExactTheta,
    ExactPhi,
    Est1,
    Est2,
    EstAvg,
    TiltTheta,
    TiltPhi,
};

struct LoomingValue {
    double value = 0.0;  // 1/s
    LoomingKind kind = LoomingKind::GroundTruth;
};

// Sphere of constant looming: passes through the camera origin with its
// diameter along t.
struct LoomingSphere {
    Vec3 center;    // m
    double radius;  // m
};

// Recovered spherical rotation components; omega_r comes in two derivations
// whose agreement cross-checks the math.
struct RecoveredRotation {
    double omega_r = 0.0;
    double omega_theta = 0.0;
    double omega_phi = 0.0;
    double omega_r_alt = 0.0;
};

// Finite-difference looming from two consecutive ranges: -((r2-r1)/dt)/r1.
double looming_discrete(double r1, double r2, double dt);

// Exact looming from the azimuthal derivative:
//   L = dtheta_dot/dtheta - phi_dot tan(phi) - (t_theta/r)(1/cos(phi))(1/r dr/dtheta).
LoomingValue looming_exact_theta(const FieldSample& s, const PartialsSample& p,
                                 const SphericalMotionComponents& comp, double r);

// Exact looming from the elevation derivative:
//   L = dphi_dot/dphi - (t_phi/r)(1/r dr/dphi).
LoomingValue looming_exact_phi(const FieldSample& s, const PartialsSample& p,
                               const SphericalMotionComponents& comp, double r);

// Range-free estimator 1: dtheta_dot/dtheta - phi_dot tan(phi).
LoomingValue looming_est1(const PartialsSample& p, const FieldSample& s);

// Range-free estimator 2: dphi_dot/dphi.
LoomingValue looming_est2(const PartialsSample& p);

// Mean of the two range-free estimators.
LoomingValue looming_est_avg(const PartialsSample& p, const FieldSample& s);

// Tilt-corrected form: Est1 + (t_theta/r) tan(gamma). Equals the exact
// looming when gamma comes from the surface normal.
LoomingValue looming_tilt_theta(const PartialsSample& p, const FieldSample& s,
                                const SphericalMotionComponents& comp, double r, double gamma);

// Tilt-corrected form: Est2 + (t_phi/r) tan(delta).
LoomingValue looming_tilt_phi(const PartialsSample& p, const SphericalMotionComponents& comp,
                              double r, double delta);

// Rotation components from the motion field and range-dependent partials:
//   omega_phi   = (1/(r cos(phi))) dr_dot/dtheta - theta_dot cos(phi)
//   omega_theta = -(1/r) dr_dot/dphi + phi_dot
//   omega_r     = -theta_dot sin(phi) + cos(phi) dtheta_dot/dphi - (t_theta/r)(1/r dr/dphi)
//   omega_r_alt = -theta_dot sin(phi) - (1/cos(phi)) dphi_dot/dtheta
//                 + (1/r dr/dtheta)(t_phi/(r cos(phi)))
RecoveredRotation recover_rotation(const FieldSample& s, const PartialsSample& p,
                                   const SphericalMotionComponents& comp, double r);

// (L_i - L)/L * 100. Throws NearZeroGroundTruth when |L| <= floor.
double error_percent(double l_i, double l, double floor = kErrorFloorDefault);

// Sphere of points sharing looming L under translation t: center t/(2L),
// radius |t|/(2L).
LoomingSphere equal_looming_sphere(const Vec3& t, double l);

}  // namespace loomkit
