#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "loomkit/looming.hpp"
#include "loomkit/motion.hpp"
#include "loomkit/spherical.hpp"
#include "loomkit/surface.hpp"

namespace loomkit {

// Middlebury .flo sanity tag and unknown-flow sentinel (|value| >= 1e9 means
// the flow at that pixel is unknown).
inline constexpr float kFloMagic = 202021.25f;
inline constexpr float kFlowUnknown = 1e10f;
inline constexpr float kFlowUnknownThreshold = 1e9f;

// Dense per-pixel displacement field, row-major, pixels per frame.
struct DenseFlow {
    int width = 0;
    int height = 0;
    std::vector<float> u;
    std::vector<float> v;
    double dt = 0.0;  // s between the two frames
    std::vector<uint8_t> valid;

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width + col;
    }
};

// Per-pixel viewing angles and angular rates derived from flow.
struct AngularRateGrids {
    int width = 0;
    int height = 0;
    std::vector<double> theta;      // rad
    std::vector<double> phi;        // rad
    std::vector<double> theta_dot;  // rad/s
    std::vector<double> phi_dot;    // rad/s
    std::vector<uint8_t> valid;

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width + col;
    }
};

// Diagonal spatial partials on the pixel grid. The theta stencil (along a
// row) and the phi stencil (along a column) fail independently, hence two
// masks.
struct PartialGrids {
    int width = 0;
    int height = 0;
    std::vector<double> dtheta_dot_dtheta;  // 1/s
    std::vector<double> dphi_dot_dphi;      // 1/s
    std::vector<uint8_t> valid_theta;
    std::vector<uint8_t> valid_phi;

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width + col;
    }
};

struct LoomingMap {
    int width = 0;
    int height = 0;
    std::vector<double> l;  // 1/s; NaN on invalid pixels
    std::vector<uint8_t> valid;
    LoomingKind provenance = LoomingKind::EstAvg;

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width + col;
    }
};

// Little-endian .flo: float tag 202021.25, int32 width, int32 height, then
// height*width (u,v) float32 pairs row-major. dt comes from the caller (flow
// files carry no timing). Throws BadMagic / TruncatedFile / IoError /
// NonPositiveDt.
DenseFlow load_flo(const std::string& path, double dt);

// Exact inverse of load_flo; invalid pixels serialize as the unknown-flow
// sentinel.
void write_flo(const DenseFlow& flow, const std::string& path);

// Per pixel: (theta, phi) at the pixel center and
// (theta_dot, phi_dot) = (direction(p + (u,v)) - direction(p)) / dt.
// Pixels whose displaced position exits the image are masked invalid.
// Throws DimensionMismatch / NonPositiveDt.
AngularRateGrids flow_to_angular_rates(const DenseFlow& flow, const CameraIntrinsics& intr);

// Optional 3x3 box filter over valid neighbors (smoothing for blocky flow);
// masks are preserved.
DenseFlow box_prefilter3(const DenseFlow& flow);

// Central differences with the actual angle denominators, one-sided at the
// borders; a pixel is invalidated when any stencil sample is invalid or the
// denominator magnitude drops below 1e-12 rad.
PartialGrids spatial_partials(const AngularRateGrids& g);

// Flag (not delete) pixels whose |partial| exceeds `multiple` times the
// median |partial| of its grid; returns a mask with 1 = flagged.
std::vector<uint8_t> edge_flags(const PartialGrids& p, double multiple = 10.0);

// Per-pixel range-free looming; mode must be Est1, Est2 or EstAvg. EstAvg
// pixels are masked when either estimator's stencil failed.
LoomingMap looming_map(const AngularRateGrids& g, const PartialGrids& p, LoomingKind mode);

// Brute-force flow oracle: intersect each pixel ray with the patch plane,
// move the 3D point by the relative rigid motion over dt (rotation by
// -omega*dt composed with translation -t*dt), reproject, emit the pixel
// displacement. Unreachable pixels (parallel ray, plane behind camera,
// point behind camera after motion) are masked.
DenseFlow synth_flow(const PlanarPatch& plane, const MotionState& state,
                     const CameraIntrinsics& intr, double dt);

// 8-bit binary PPM: positive looming in red (255*min(L/L3, 1)), negative in
// blue, invalid pixels gray (128,128,128). With zone_overlay the channel is
// quantized to 4 threat bands (63/127/191/255) split at the thresholds.
// Thresholds must be strictly increasing. Throws BadThresholds / IoError.
void render_threat_map(const LoomingMap& m, const std::array<double, 3>& thresholds,
                       const std::string& path, bool zone_overlay = false);

// Row-major CSV dump of the map, `nan` for invalid pixels, full precision.
void write_map_csv(const LoomingMap& m, const std::string& path);

// JSON loaders for the CLI file formats.
CameraIntrinsics load_intrinsics_json(const std::string& path);  // {fx,fy,cx,cy,width,height}
MotionState load_motion_json(const std::string& path);           // {t:[..], omega:[..]}
PlanarPatch load_patch_json(const std::string& path);            // {a:[..], b:[..], c:[..]}

}  // namespace loomkit
