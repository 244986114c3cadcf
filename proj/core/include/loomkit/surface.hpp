#pragma once

#include "loomkit/looming.hpp"
#include "loomkit/motion.hpp"
#include "loomkit/spherical.hpp"
#include "loomkit/vec3.hpp"

namespace loomkit {

// A surface is edge-on (tilt angles undefined) below this |e_r . n|.
inline constexpr double kEdgeOnEps = 1e-9;

// Planar patch as a triangle; the plane through it supplies ranges and the
// normal. Vertices are in whatever frame the caller works in.
struct PlanarPatch {
    Vec3 a, b, c;
};

// Surface tilt against the viewing frame:
//   gamma = atan((e_theta . n)/(e_r . n)),  delta = atan((e_phi . n)/(e_r . n)).
struct TiltAngles {
    double gamma = 0.0;  // rad
    double delta = 0.0;  // rad
};

// Everything an analytic plane scene determines at one viewing direction:
// range, motion field, exact spatial partials, tilt angles, components.
struct PlaneSceneSample {
    double r = 0.0;
    FieldSample field;
    PartialsSample partials;
    TiltAngles tilt;
    SphericalMotionComponents comps;
    Vec3 normal;  // unit, oriented so e_r . n < 0
};

// Unit normal of the triangle plane, oriented to face the origin
// (e_r . n < 0 for rays from the origin). Throws DegeneratePatch.
Vec3 patch_normal(const PlanarPatch& p);

// Same, oriented to face an arbitrary viewpoint.
Vec3 patch_normal(const PlanarPatch& p, const Vec3& viewpoint);

// Range along the camera ray e_r(dir) (camera axes given by cam_orient
// columns) to the patch plane. Throws ParallelRay / BehindCamera.
double ray_range(const PlanarPatch& p, const Direction& dir, const Vec3& cam_pos,
                 const Mat3& cam_orient);

// (1/r)dr/dtheta = -cos(phi)(e_theta.n)/(e_r.n),  (1/r)dr/dphi = -(e_phi.n)/(e_r.n).
// n is the camera-frame surface normal. Throws EdgeOnSurface.
LogRangePartials log_range_partials(const Vec3& n, const Direction& dir);

// Tilt angles from the camera-frame normal. Throws EdgeOnSurface.
TiltAngles tilt_angles(const Vec3& n, const Direction& dir);

// Closed-form sample of a plane scene {x : n.x = c} (camera at origin,
// camera-frame n and motion state). Differentiates the motion field
// analytically; this is the oracle behind the exact-form and rotation
// recovery tests and the simulator. Throws EdgeOnSurface / BehindCamera /
// PolarSingularity.
PlaneSceneSample plane_scene_sample(const Vec3& n, double c, const Direction& dir,
                                    const MotionState& state);

}  // namespace loomkit
