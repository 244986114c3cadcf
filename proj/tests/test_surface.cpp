#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "loomkit/surface.hpp"

using namespace loomkit;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Scene {
    Vec3 n;
    double c;
    Direction dir;
    MotionState state;
};

Scene random_scene(std::mt19937& rng) {
    std::uniform_real_distribution<double> ang(-1.1, 1.1);
    std::uniform_real_distribution<double> ur(2.0, 50.0);
    std::uniform_real_distribution<double> uv(-2.0, 2.0);
    std::uniform_real_distribution<double> uw(-0.5, 0.5);
    Scene sc;
    sc.dir = {ang(rng), ang(rng)};
    const Vec3 e_r = frame_at(sc.dir).e_r;
    Vec3 n;
    do {
        n = Vec3{uv(rng), uv(rng), uv(rng)};
    } while (n.norm() < 0.3 || std::abs(n.normalized().dot(e_r)) < 0.2);
    sc.n = n.normalized();
    sc.c = sc.n.dot(e_r * ur(rng));
    sc.state.t = {uv(rng), uv(rng), uv(rng)};
    sc.state.omega = {uw(rng), uw(rng), uw(rng)};
    return sc;
}

// Range along e_r to the plane n.x = c, for differencing r and log r.
double plane_range(const Vec3& n, double c, const Direction& dir) {
    return c / n.dot(frame_at(dir).e_r);
}

}  // namespace

TEST(PatchNormal, FacesTheViewpoint) {
    const PlanarPatch p{{10, 1, 0}, {10, 0, 1}, {10, -1, -1}};
    const Vec3 n0 = patch_normal(p);
    EXPECT_NEAR(n0.x, -1.0, 1e-12);
    EXPECT_NEAR(n0.y, 0.0, 1e-12);
    EXPECT_NEAR(n0.z, 0.0, 1e-12);
    const Vec3 n1 = patch_normal(p, {20, 0, 0});
    EXPECT_NEAR(n1.x, 1.0, 1e-12);
    const Vec3 n2 = patch_normal(p, {0, 0, 0});
    EXPECT_DOUBLE_EQ(n2.x, n0.x);
}

TEST(PatchNormal, RejectsCollinearVertices) {
    const PlanarPatch p{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
    try {
        patch_normal(p);
        FAIL() << "collinear patch accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegeneratePatch);
    }
}

TEST(RayRange, HitsKnownPlanePoints) {
    const PlanarPatch p{{10, 5, 5}, {10, -5, 5}, {10, 0, -5}};
    const Vec3 cam_pos{1.0, 0.5, -0.25};
    const Mat3 orient =
        Mat3::rotation({0.1, -0.2, 0.3});  // arbitrary right-handed camera attitude
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 point{10.0, u(rng), u(rng)};  // on the patch plane x = 10
        const Direction dir = cart_to_spherical(orient.tapply(point - cam_pos)).dir;
        const double r = ray_range(p, dir, cam_pos, orient);
        EXPECT_NEAR(r, (point - cam_pos).norm(), 1e-9);
    }
}

TEST(RayRange, RejectsBackSideAndParallelRays) {
    const PlanarPatch p{{10, 5, 5}, {10, -5, 5}, {10, 0, -5}};
    try {
        ray_range(p, {kPi - 0.2, 0.0}, {0, 0, 0}, Mat3::identity());  // looking away
        FAIL() << "plane behind camera accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::BehindCamera);
    }
    try {
        ray_range(p, {kPi / 2, 0.0}, {0, 0, 0}, Mat3::identity());  // along the plane
        FAIL() << "parallel ray accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParallelRay);
    }
}

TEST(LogRangePartialsOp, MatchesDifferencedPlaneRange) {
    std::mt19937 rng(72);
    const double h = 1e-5;
    for (int i = 0; i < 300; ++i) {
        const Scene sc = random_scene(rng);
        const LogRangePartials lr = log_range_partials(sc.n, sc.dir);
        const double fd_theta = (std::log(plane_range(sc.n, sc.c, {sc.dir.theta + h, sc.dir.phi})) -
                                 std::log(plane_range(sc.n, sc.c, {sc.dir.theta - h, sc.dir.phi}))) /
                                (2.0 * h);
        const double fd_phi = (std::log(plane_range(sc.n, sc.c, {sc.dir.theta, sc.dir.phi + h})) -
                               std::log(plane_range(sc.n, sc.c, {sc.dir.theta, sc.dir.phi - h}))) /
                              (2.0 * h);
        EXPECT_NEAR(lr.d_theta, fd_theta, 1e-6 * std::max(1.0, std::abs(fd_theta)));
        EXPECT_NEAR(lr.d_phi, fd_phi, 1e-6 * std::max(1.0, std::abs(fd_phi)));
    }
}

TEST(TiltAnglesOp, TiltsEncodeTheRangeSlopes) {
    std::mt19937 rng(73);
    for (int i = 0; i < 300; ++i) {
        const Scene sc = random_scene(rng);
        const TiltAngles tilt = tilt_angles(sc.n, sc.dir);
        const LogRangePartials lr = log_range_partials(sc.n, sc.dir);
        EXPECT_NEAR(lr.d_theta, -std::cos(sc.dir.phi) * std::tan(tilt.gamma), 1e-12);
        EXPECT_NEAR(lr.d_phi, -std::tan(tilt.delta), 1e-12);
        EXPECT_LT(std::abs(tilt.gamma), kPi / 2);
        EXPECT_LT(std::abs(tilt.delta), kPi / 2);
    }
}

TEST(TiltAnglesOp, RejectsEdgeOnSurfaces) {
    // normal orthogonal to the ray at theta = phi = 0
    try {
        tilt_angles({0, 1, 0}, {0.0, 0.0});
        FAIL() << "edge-on surface accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::EdgeOnSurface);
    }
    try {
        log_range_partials({0, 0, 1}, {0.0, 0.0});
        FAIL() << "edge-on surface accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::EdgeOnSurface);
    }
}

// Central-difference every analytic partial: the motion field of the same
// plane is sampled at displaced directions and differenced.
TEST(PlaneSceneSampleOp, PartialsMatchDifferencedField) {
    std::mt19937 rng(74);
    const double h = 1e-6;
    for (int i = 0; i < 200; ++i) {
        const Scene sc = random_scene(rng);
        PlaneSceneSample s;
        try {
            s = plane_scene_sample(sc.n, sc.c, sc.dir, sc.state);
        } catch (const LoomError&) {
            continue;
        }
        auto field_at = [&](const Direction& d) {
            return plane_scene_sample(sc.n, sc.c, d, sc.state);
        };
        const PlaneSceneSample tp = field_at({sc.dir.theta + h, sc.dir.phi});
        const PlaneSceneSample tm = field_at({sc.dir.theta - h, sc.dir.phi});
        const PlaneSceneSample pp = field_at({sc.dir.theta, sc.dir.phi + h});
        const PlaneSceneSample pm = field_at({sc.dir.theta, sc.dir.phi - h});

        const double tol = 1e-6;
        EXPECT_NEAR(s.partials.dtheta_dot_dtheta,
                    (tp.field.theta_dot - tm.field.theta_dot) / (2 * h), tol);
        EXPECT_NEAR(s.partials.dtheta_dot_dphi,
                    (pp.field.theta_dot - pm.field.theta_dot) / (2 * h), tol);
        EXPECT_NEAR(s.partials.dphi_dot_dtheta, (tp.field.phi_dot - tm.field.phi_dot) / (2 * h),
                    tol);
        EXPECT_NEAR(s.partials.dphi_dot_dphi, (pp.field.phi_dot - pm.field.phi_dot) / (2 * h),
                    tol);
        ASSERT_TRUE(s.partials.dr_dot_dtheta.has_value());
        ASSERT_TRUE(s.partials.dr_dot_dphi.has_value());
        EXPECT_NEAR(*s.partials.dr_dot_dtheta,
                    (*tp.field.r_dot_over_r * tp.r - *tm.field.r_dot_over_r * tm.r) / (2 * h),
                    tol);
        EXPECT_NEAR(*s.partials.dr_dot_dphi,
                    (*pp.field.r_dot_over_r * pp.r - *pm.field.r_dot_over_r * pm.r) / (2 * h),
                    tol);
        ASSERT_TRUE(s.partials.log_range_partials.has_value());
        EXPECT_NEAR(s.partials.log_range_partials->d_theta, (std::log(tp.r) - std::log(tm.r)) / (2 * h),
                    tol);
        EXPECT_NEAR(s.partials.log_range_partials->d_phi, (std::log(pp.r) - std::log(pm.r)) / (2 * h),
                    tol);
        // the sample's own normal is unit and faces the camera
        EXPECT_NEAR(s.normal.norm(), 1.0, 1e-12);
        EXPECT_LT(s.normal.dot(frame_at(sc.dir).e_r), 0.0);
    }
}

// Plane x = 10, camera at the origin translating along +x, ray at 30 degrees
// azimuth: every number is checkable by hand.
TEST(PlaneSceneSampleOp, WorkedExample) {
    const Vec3 n{-1, 0, 0};
    const double c = -10.0;
    const Direction dir{kPi / 6, 0.0};
    const MotionState state{{1, 0, 0}, {0, 0, 0}};
    const PlaneSceneSample s = plane_scene_sample(n, c, dir, state);

    const double cos30 = std::cos(kPi / 6);
    EXPECT_NEAR(s.r, 10.0 / cos30, 1e-12);                    // 11.547...
    EXPECT_NEAR(s.tilt.gamma, -kPi / 6, 1e-12);               // surface slants away in theta
    EXPECT_NEAR(s.tilt.delta, 0.0, 1e-12);
    EXPECT_NEAR(s.partials.log_range_partials->d_theta, std::tan(kPi / 6), 1e-12);
    EXPECT_NEAR(s.partials.log_range_partials->d_phi, 0.0, 1e-12);

    const double l = s.comps.t_r / s.r;
    EXPECT_NEAR(l, 0.075, 1e-12);  // cos^2(30deg)/10
    EXPECT_NEAR(looming_est1(s.partials, s.field).value, 0.05, 1e-12);
    EXPECT_NEAR(looming_est2(s.partials).value, 0.075, 1e-12);
    EXPECT_NEAR(looming_exact_theta(s.field, s.partials, s.comps, s.r).value, l, 1e-12);
    EXPECT_NEAR(looming_exact_phi(s.field, s.partials, s.comps, s.r).value, l, 1e-12);
    // the azimuthal correction term restores what est1 misses
    EXPECT_NEAR(l - looming_est1(s.partials, s.field).value, 0.025, 1e-12);
}

TEST(PlaneSceneSampleOp, RejectsPlaneBehindCamera) {
    try {
        plane_scene_sample({-1, 0, 0}, 10.0, {0.0, 0.0}, {{1, 0, 0}, {0, 0, 0}});
        FAIL() << "plane behind camera accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::BehindCamera);
    }
}

TEST(PlaneSceneSampleOp, RejectsEdgeOnPlane) {
    try {
        plane_scene_sample({0, 1, 0}, 5.0, {0.0, 0.0}, {{1, 0, 0}, {0, 0, 0}});
        FAIL() << "edge-on plane accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::EdgeOnSurface);
    }
}
