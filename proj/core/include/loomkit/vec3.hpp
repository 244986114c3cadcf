#pragma once

#include <cmath>

namespace loomkit {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    // Componentwise product; used for axis-sign masks.
    constexpr Vec3 cwise(const Vec3& o) const { return {x * o.x, y * o.y, z * o.z}; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

// 3x3 matrix stored as three column vectors. Orientation matrices keep the
// camera axes in the columns: col0 = forward (optical axis), col1 = left,
// col2 = up, all expressed in the world frame.
struct Mat3 {
    Vec3 c0, c1, c2;

    static Mat3 identity() { return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}; }
    static Mat3 from_columns(const Vec3& a, const Vec3& b, const Vec3& c) { return {a, b, c}; }

    // Cross-product matrix: skew(w) * v == w x v.
    static Mat3 skew(const Vec3& w) {
        return {{0, w.z, -w.y}, {-w.z, 0, w.x}, {w.y, -w.x, 0}};
    }

    // Rodrigues rotation about axis-angle vector w (angle = |w|, radians).
    static Mat3 rotation(const Vec3& w) {
        const double angle = w.norm();
        if (angle < 1e-14) {
            return identity();
        }
        const Vec3 k = w / angle;
        const Mat3 kx = skew(k);
        const double s = std::sin(angle);
        const double c = std::cos(angle);
        return identity() + kx * s + (kx * kx) * (1.0 - c);
    }

    Vec3 operator*(const Vec3& v) const { return c0 * v.x + c1 * v.y + c2 * v.z; }
    Mat3 operator*(const Mat3& m) const { return {*this * m.c0, *this * m.c1, *this * m.c2}; }
    Mat3 operator*(double s) const { return {c0 * s, c1 * s, c2 * s}; }
    Mat3 operator+(const Mat3& m) const { return {c0 + m.c0, c1 + m.c1, c2 + m.c2}; }

    Mat3 transpose() const {
        return {{c0.x, c1.x, c2.x}, {c0.y, c1.y, c2.y}, {c0.z, c1.z, c2.z}};
    }

    // Row-multiply (transpose apply): equivalent to transpose() * v.
    Vec3 tapply(const Vec3& v) const { return {c0.dot(v), c1.dot(v), c2.dot(v)}; }

    // Re-orthonormalize a near-rotation matrix (modified Gram-Schmidt on the
    // columns); keeps fixed-step integration from drifting off SO(3).
    Mat3 orthonormalized() const {
        Vec3 a = c0.normalized();
        Vec3 b = c1 - a * a.dot(c1);
        b = b.normalized();
        Vec3 c = c2 - a * a.dot(c2) - b * b.dot(c2);
        c = c.normalized();
        return {a, b, c};
    }
};

}  // namespace loomkit
