#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "loomkit/looming.hpp"
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

// Plane guaranteed to intersect the ray at range r0 in front of the camera.
Scene random_scene(std::mt19937& rng, bool with_rotation = true) {
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
    } while (n.norm() < 0.3 || std::abs(n.normalized().dot(e_r)) < 0.15);
    sc.n = n.normalized();
    sc.c = sc.n.dot(e_r * ur(rng));
    sc.state.t = {uv(rng), uv(rng), uv(rng)};
    sc.state.omega = with_rotation ? Vec3{uw(rng), uw(rng), uw(rng)} : Vec3{0, 0, 0};
    return sc;
}

}  // namespace

TEST(LoomingDiscrete, HandNumbersAndGuards) {
    EXPECT_DOUBLE_EQ(looming_discrete(10.0, 9.75, 0.25), 0.1);
    EXPECT_LT(looming_discrete(10.0, 10.5, 0.1), 0.0);
    try {
        looming_discrete(0.0, 9.9, 0.1);
        FAIL() << "zero range accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveRange);
    }
    try {
        looming_discrete(10.0, 9.9, 0.0);
        FAIL() << "zero dt accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveDt);
    }
}

// On an analytic plane scene every range-aware form must reproduce t_r/r.
TEST(LoomingForms, ExactAndTiltFormsMatchGroundTruth) {
    std::mt19937 rng(3001);
    for (int i = 0; i < 500; ++i) {
        const Scene sc = random_scene(rng);
        PlaneSceneSample s;
        try {
            s = plane_scene_sample(sc.n, sc.c, sc.dir, sc.state);
        } catch (const LoomError&) {
            continue;
        }
        const double l = s.comps.t_r / s.r;
        const double tol = 1e-9 * std::max(1.0, std::abs(l));
        EXPECT_NEAR(looming_exact_theta(s.field, s.partials, s.comps, s.r).value, l, tol);
        EXPECT_NEAR(looming_exact_phi(s.field, s.partials, s.comps, s.r).value, l, tol);
        EXPECT_NEAR(looming_tilt_theta(s.partials, s.field, s.comps, s.r, s.tilt.gamma).value, l,
                    tol);
        EXPECT_NEAR(looming_tilt_phi(s.partials, s.comps, s.r, s.tilt.delta).value, l, tol);
        EXPECT_NEAR(looming_est_avg(s.partials, s.field).value,
                    0.5 * (looming_est1(s.partials, s.field).value +
                           looming_est2(s.partials).value),
                    1e-15);
    }
}

TEST(LoomingForms, KindsTagTheSource) {
    std::mt19937 rng(3002);
    const Scene sc = random_scene(rng);
    const PlaneSceneSample s = plane_scene_sample(sc.n, sc.c, sc.dir, sc.state);
    EXPECT_EQ(looming_exact_theta(s.field, s.partials, s.comps, s.r).kind, LoomingKind::ExactTheta);
    EXPECT_EQ(looming_exact_phi(s.field, s.partials, s.comps, s.r).kind, LoomingKind::ExactPhi);
    EXPECT_EQ(looming_est1(s.partials, s.field).kind, LoomingKind::Est1);
    EXPECT_EQ(looming_est2(s.partials).kind, LoomingKind::Est2);
    EXPECT_EQ(looming_est_avg(s.partials, s.field).kind, LoomingKind::EstAvg);
    EXPECT_EQ(looming_tilt_theta(s.partials, s.field, s.comps, s.r, s.tilt.gamma).kind,
              LoomingKind::TiltTheta);
    EXPECT_EQ(looming_tilt_phi(s.partials, s.comps, s.r, s.tilt.delta).kind,
              LoomingKind::TiltPhi);
}

// The range-free estimators depend only on translation and geometry: swapping
// the rotation out from under the same scene must not move them.
TEST(LoomingForms, EstimatorsIgnoreRotation) {
    std::mt19937 rng(3003);
    std::uniform_real_distribution<double> uw(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        Scene sc = random_scene(rng, /*with_rotation=*/false);
        PlaneSceneSample base;
        try {
            base = plane_scene_sample(sc.n, sc.c, sc.dir, sc.state);
        } catch (const LoomError&) {
            continue;
        }
        sc.state.omega = {uw(rng), uw(rng), uw(rng)};
        const PlaneSceneSample spun = plane_scene_sample(sc.n, sc.c, sc.dir, sc.state);
        EXPECT_NEAR(looming_est1(spun.partials, spun.field).value,
                    looming_est1(base.partials, base.field).value, 1e-9);
        EXPECT_NEAR(looming_est2(spun.partials).value, looming_est2(base.partials).value, 1e-9);
    }
}

TEST(LoomingForms, ExactFormsNeedRangePartials) {
    PartialsSample p;
    p.dtheta_dot_dtheta = 0.1;
    p.dphi_dot_dphi = 0.1;
    FieldSample s;
    s.dir = {0.2, 0.1};
    SphericalMotionComponents comp;
    try {
        looming_exact_theta(s, p, comp, 10.0);
        FAIL() << "missing partials accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingRangePartials);
    }
    try {
        looming_exact_phi(s, p, comp, 10.0);
        FAIL() << "missing partials accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingRangePartials);
    }
    try {
        recover_rotation(s, p, comp, 10.0);
        FAIL() << "missing partials accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingRangePartials);
    }
}

TEST(RecoverRotation, RoundTripsTrueRotation) {
    std::mt19937 rng(3004);
    for (int i = 0; i < 300; ++i) {
        const Scene sc = random_scene(rng);
        PlaneSceneSample s;
        try {
            s = plane_scene_sample(sc.n, sc.c, sc.dir, sc.state);
        } catch (const LoomError&) {
            continue;
        }
        const RecoveredRotation rec = recover_rotation(s.field, s.partials, s.comps, s.r);
        EXPECT_NEAR(rec.omega_r, s.comps.omega_r, 1e-9);
        EXPECT_NEAR(rec.omega_theta, s.comps.omega_theta, 1e-9);
        EXPECT_NEAR(rec.omega_phi, s.comps.omega_phi, 1e-9);
        EXPECT_NEAR(rec.omega_r_alt, rec.omega_r, 1e-9);
    }
}

TEST(ErrorPercent, SignedRelativeError) {
    EXPECT_NEAR(error_percent(0.147, 0.129), 13.953488372093023, 1e-12);
    EXPECT_NEAR(error_percent(0.117, 0.129), -9.302325581395348, 1e-12);
    try {
        error_percent(0.1, 1e-7);
        FAIL() << "near-zero ground truth accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::NearZeroGroundTruth);
    }
    try {
        error_percent(0.1, 0.01, 0.05);
        FAIL() << "custom floor ignored";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::NearZeroGroundTruth);
    }
}

// Every point of the sphere (center t/2L, radius |t|/2L) must itself loom at
// L under pure translation t: for a static point, L = (t . p)/|p|^2.
TEST(EqualLoomingSphere, PointsOnSphereShareTheLooming) {
    std::mt19937 rng(3005);
    std::uniform_real_distribution<double> uv(-3.0, 3.0);
    std::uniform_real_distribution<double> ul(0.02, 2.0);
    std::uniform_real_distribution<double> us(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        Vec3 t{uv(rng), uv(rng), uv(rng)};
        if (t.norm() < 0.1) {
            continue;
        }
        const double l = ul(rng);
        const LoomingSphere sphere = equal_looming_sphere(t, l);
        EXPECT_NEAR(sphere.center.norm(), sphere.radius, 1e-12 * sphere.radius);
        Vec3 u{us(rng), us(rng), us(rng)};
        if (u.norm() < 1e-3) {
            continue;
        }
        const Vec3 p = sphere.center + u.normalized() * sphere.radius;
        if (p.norm() < 1e-6 * sphere.radius) {
            continue;  // the sphere touches the camera origin
        }
        EXPECT_NEAR(t.dot(p) / p.dot(p), l, 1e-9 * l);
    }
}

TEST(EqualLoomingSphere, RejectsDegenerateInputs) {
    try {
        equal_looming_sphere({0, 0, 0}, 0.1);
        FAIL() << "zero translation accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroTranslation);
    }
    try {
        equal_looming_sphere({1, 0, 0}, 0.0);
        FAIL() << "zero looming accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveLooming);
    }
    try {
        equal_looming_sphere({1, 0, 0}, -0.1);
        FAIL() << "receding looming accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveLooming);
    }
}

TEST(LoomingForms, PolarGuard) {
    PartialsSample p;
    p.log_range_partials = LogRangePartials{0.0, 0.0};
    p.dr_dot_dtheta = 0.0;
    p.dr_dot_dphi = 0.0;
    FieldSample s;
    s.dir = {0.0, kPi / 2 - 1e-9};
    SphericalMotionComponents comp;
    try {
        looming_est1(p, s);
        FAIL() << "polar direction accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::PolarSingularity);
    }
    try {
        looming_exact_theta(s, p, comp, 10.0);
        FAIL() << "polar direction accepted";
    } catch (const LoomError& e) {
        EXPECT_EQ(e.code(), ErrorCode::PolarSingularity);
    }
}
