#include "loomkit/looming.hpp"

#include <cmath>

#include "loomkit/errors.hpp"

namespace loomkit {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

void require_off_pole(double phi) {
    if (std::abs(phi) >= kHalfPi - kPolarGuard) {
        throw LoomError(ErrorCode::PolarSingularity, "looming form undefined at the poles");
    }
}

const LogRangePartials& require_range_partials(const PartialsSample& p) {
    if (!p.log_range_partials.has_value()) {
        throw LoomError(ErrorCode::MissingRangePartials,
                        "exact looming forms need logarithmic range partials");
    }
    return *p.log_range_partials;
}

}  // namespace

double looming_discrete(double r1, double r2, double dt) {
    if (r1 <= 0.0 || r2 <= 0.0) {
        throw LoomError(ErrorCode::NonPositiveRange, "ranges must be positive");
    }
    if (dt <= 0.0) {
        throw LoomError(ErrorCode::NonPositiveDt, "time step must be positive");
    }
    return -((r2 - r1) / dt) / r1;
}

LoomingValue looming_exact_theta(const FieldSample& s, const PartialsSample& p,
                                 const SphericalMotionComponents& comp, double r) {
    const LogRangePartials& lr = require_range_partials(p);
    require_off_pole(s.dir.phi);
    const double phi = s.dir.phi;
    const double value = p.dtheta_dot_dtheta - s.phi_dot * std::tan(phi) -
                         (comp.t_theta / r) * (1.0 / std::cos(phi)) * lr.d_theta;
    return {value, LoomingKind::ExactTheta};
}

LoomingValue looming_exact_phi(const FieldSample& s, const PartialsSample& p,
                               const SphericalMotionComponents& comp, double r) {
    const LogRangePartials& lr = require_range_partials(p);
    require_off_pole(s.dir.phi);
    const double value = p.dphi_dot_dphi - (comp.t_phi / r) * lr.d_phi;
    return {value, LoomingKind::ExactPhi};
}

LoomingValue looming_est1(const PartialsSample& p, const FieldSample& s) {
    require_off_pole(s.dir.phi);
    return {p.dtheta_dot_dtheta - s.phi_dot * std::tan(s.dir.phi), LoomingKind::Est1};
}

LoomingValue looming_est2(const PartialsSample& p) {
    return {p.dphi_dot_dphi, LoomingKind::Est2};
}

LoomingValue looming_est_avg(const PartialsSample& p, const FieldSample& s) {
    const double est1 = looming_est1(p, s).value;
    const double est2 = looming_est2(p).value;
    return {0.5 * (est1 + est2), LoomingKind::EstAvg};
}

LoomingValue looming_tilt_theta(const PartialsSample& p, const FieldSample& s,
                                const SphericalMotionComponents& comp, double r, double gamma) {
    require_off_pole(s.dir.phi);
    if (std::abs(gamma) >= kHalfPi - kPolarGuard) {
        throw LoomError(ErrorCode::TiltSingularity, "tan(gamma) diverges for edge-on tilt");
    }
    const double est1 = p.dtheta_dot_dtheta - s.phi_dot * std::tan(s.dir.phi);
    return {est1 + (comp.t_theta / r) * std::tan(gamma), LoomingKind::TiltTheta};
}

LoomingValue looming_tilt_phi(const PartialsSample& p, const SphericalMotionComponents& comp,
                              double r, double delta) {
    if (std::abs(delta) >= kHalfPi - kPolarGuard) {
        throw LoomError(ErrorCode::TiltSingularity, "tan(delta) diverges for edge-on tilt");
    }
    return {p.dphi_dot_dphi + (comp.t_phi / r) * std::tan(delta), LoomingKind::TiltPhi};
}

RecoveredRotation recover_rotation(const FieldSample& s, const PartialsSample& p,
                                   const SphericalMotionComponents& comp, double r) {
    if (!p.dr_dot_dtheta.has_value() || !p.dr_dot_dphi.has_value()) {
        throw LoomError(ErrorCode::MissingRangePartials,
                        "rotation recovery needs dr_dot/dtheta and dr_dot/dphi");
    }
    const LogRangePartials& lr = require_range_partials(p);
    require_off_pole(s.dir.phi);
    const double phi = s.dir.phi;
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    RecoveredRotation out;
    out.omega_phi = (1.0 / (r * cp)) * (*p.dr_dot_dtheta) - s.theta_dot * cp;
    out.omega_theta = -(1.0 / r) * (*p.dr_dot_dphi) + s.phi_dot;
    out.omega_r = -s.theta_dot * sp + cp * p.dtheta_dot_dphi - (comp.t_theta / r) * lr.d_phi;
    out.omega_r_alt = -s.theta_dot * sp - (1.0 / cp) * p.dphi_dot_dtheta +
                      lr.d_theta * (comp.t_phi / (r * cp));
    return out;
}

double error_percent(double l_i, double l, double floor) {
    if (std::abs(l) <= floor) {
        throw LoomError(ErrorCode::NearZeroGroundTruth,
                        "relative error undefined near zero ground truth");
    }
    return (l_i - l) / l * 100.0;
}

LoomingSphere equal_looming_sphere(const Vec3& t, double l) {
    const double speed = t.norm();
    if (speed == 0.0) {
        throw LoomError(ErrorCode::ZeroTranslation, "equal-looming sphere needs nonzero translation");
    }
    if (l <= 0.0) {
        throw LoomError(ErrorCode::NonPositiveLooming, "equal-looming sphere needs positive looming");
    }
    return {t / (2.0 * l), speed / (2.0 * l)};
}

}  // namespace loomkit
