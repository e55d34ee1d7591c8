#pragma once

#include <array>
#include <cmath>

#include "smoothrast/tape.hpp"

namespace smoothrast {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

// Differentiable 3-vector on a tape.
struct DVec3 {
    Var x, y, z;

    DVec3 operator+(const DVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    DVec3 operator-(const DVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    DVec3 operator*(Var s) const { return {x * s, y * s, z * s}; }
    DVec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Var operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 value() const { return {x.value(), y.value(), z.value()}; }
};

inline Var dot(const DVec3& a, const DVec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Var dot(const DVec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline DVec3 cross(const DVec3& a, const DVec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Normalization with a smooth guard: v / sqrt(|v|^2 + eps^2). Degenerate
// vectors map to ~0 instead of blowing up.
inline DVec3 normalized_smooth(const DVec3& v, double eps = kSmoothAbsEps) {
    Var n = sqrt(dot(v, v) + eps * eps);
    return {v.x / n, v.y / n, v.z / n};
}

inline DVec3 lift(Tape& t, const Vec3& v, bool requires_grad = false) {
    return {t.leaf(v.x, requires_grad), t.leaf(v.y, requires_grad), t.leaf(v.z, requires_grad)};
}

}  // namespace smoothrast
