#include "loomkit/surface.hpp"

#include <cmath>

#include "loomkit/errors.hpp"

namespace loomkit {

namespace {

Vec3 raw_plane_normal(const PlanarPatch& p) {
    const Vec3 n = (p.b - p.a).cross(p.c - p.a);
    if (n.norm() <= 1e-9) {
        throw LoomError(ErrorCode::DegeneratePatch, "triangle vertices are collinear");
    }
    return n.normalized();
}

}  // namespace

Vec3 patch_normal(const PlanarPatch& p) { return patch_normal(p, Vec3{0, 0, 0}); }

Vec3 patch_normal(const PlanarPatch& p, const Vec3& viewpoint) {
    Vec3 n = raw_plane_normal(p);
    // Face the viewpoint: the outward ray from the viewpoint to the patch
    // must run against the normal.
    if (n.dot(p.a - viewpoint) > 0.0) {
        n = -n;
    }
    return n;
}

double ray_range(const PlanarPatch& p, const Direction& dir, const Vec3& cam_pos,
                 const Mat3& cam_orient) {
    const Vec3 n = raw_plane_normal(p);
    const Vec3 ray_world = cam_orient * frame_at(dir).e_r;
    const double denom = n.dot(ray_world);
    if (std::abs(denom) <= 1e-9) {
        throw LoomError(ErrorCode::ParallelRay, "viewing ray parallel to the patch plane");
    }
    const double r = n.dot(p.a - cam_pos) / denom;
    if (r <= 0.0) {
        throw LoomError(ErrorCode::BehindCamera, "patch plane behind the camera along this ray");
    }
    return r;
}

LogRangePartials log_range_partials(const Vec3& n, const Direction& dir) {
    const Frame f = frame_at(dir);
    const double ern = f.e_r.dot(n);
    if (std::abs(ern) <= kEdgeOnEps) {
        throw LoomError(ErrorCode::EdgeOnSurface, "surface seen edge-on");
    }
    return {-std::cos(dir.phi) * f.e_theta.dot(n) / ern, -f.e_phi.dot(n) / ern};
}

TiltAngles tilt_angles(const Vec3& n, const Direction& dir) {
    const Frame f = frame_at(dir);
    const double ern = f.e_r.dot(n);
    if (std::abs(ern) <= kEdgeOnEps) {
        throw LoomError(ErrorCode::EdgeOnSurface, "surface seen edge-on");
    }
    return {std::atan(f.e_theta.dot(n) / ern), std::atan(f.e_phi.dot(n) / ern)};
}

PlaneSceneSample plane_scene_sample(const Vec3& n_in, double c_in, const Direction& dir,
                                    const MotionState& state) {
    if (std::abs(dir.phi) >= 1.57079632679489661923 - kPolarGuard) {
        throw LoomError(ErrorCode::PolarSingularity, "plane sample too close to the poles");
    }
    const Frame f = frame_at(dir);
    Vec3 n = n_in.normalized();
    double c = c_in / n_in.norm();
    // Orient the normal toward the camera so the tilt arctangents stay in
    // (-pi/2, pi/2); flipping (n, c) together leaves the plane unchanged.
    double ern = f.e_r.dot(n);
    if (std::abs(ern) <= kEdgeOnEps) {
        throw LoomError(ErrorCode::EdgeOnSurface, "plane seen edge-on");
    }
    if (ern > 0.0) {
        n = -n;
        c = -c;
        ern = -ern;
    }
    const double r = c / ern;
    if (r <= 0.0) {
        throw LoomError(ErrorCode::BehindCamera, "plane behind the camera along this ray");
    }

    PlaneSceneSample out;
    out.r = r;
    out.normal = n;
    out.comps = decompose(state, dir);
    out.tilt = tilt_angles(n, dir);

    const double u = ern / c;  // 1/r
    const double cp = std::cos(dir.phi);
    const double sp = std::sin(dir.phi);
    const double tp = sp / cp;
    const double ntheta = f.e_theta.dot(n);
    const double nphi = f.e_phi.dot(n);
    const SphericalMotionComponents& mc = out.comps;

    out.field.dir = dir;
    out.field.r_dot_over_r = -mc.t_r * u;
    out.field.theta_dot = (-mc.t_theta * u - mc.omega_phi) / cp;
    out.field.phi_dot = -mc.t_phi * u + mc.omega_theta;

    // Exact derivatives of the field over (theta, phi) at fixed camera state.
    // They follow from the frame derivatives (d e_r/d theta = cos(phi) e_theta
    // etc.) and from d(1/r) = (n . d e_r)/c on the plane.
    const double du_dtheta = cp * ntheta / c;
    const double du_dphi = nphi / c;
    PartialsSample& p = out.partials;
    p.dtheta_dot_dtheta =
        mc.t_r * u - tp * mc.t_phi * u - mc.t_theta * ntheta / c + tp * mc.omega_theta;
    p.dtheta_dot_dphi = (-mc.t_theta * du_dphi + mc.omega_r) / cp + out.field.theta_dot * tp;
    p.dphi_dot_dphi = mc.t_r * u - mc.t_phi * nphi / c;
    p.dphi_dot_dtheta =
        sp * mc.t_theta * u - mc.t_phi * du_dtheta - cp * mc.omega_r + sp * mc.omega_phi;
    p.dr_dot_dtheta = -cp * mc.t_theta;
    p.dr_dot_dphi = -mc.t_phi;
    p.log_range_partials = log_range_partials(n, dir);
    return out;
}

}  // namespace loomkit
