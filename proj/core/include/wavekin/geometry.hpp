#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace wavekin {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Symmetric 3x3 matrix helper used for kernel Hessians.
struct Mat3 {
    // row-major
    std::array<double, 9> m{};

    double& operator()(int i, int j) { return m[3 * i + j]; }
    double operator()(int i, int j) const { return m[3 * i + j]; }

    Vec3 apply(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3& operator+=(const Mat3& o) {
        for (std::size_t i = 0; i < 9; ++i) m[i] += o.m[i];
        return *this;
    }
    Mat3& operator*=(double s) {
        for (std::size_t i = 0; i < 9; ++i) m[i] *= s;
        return *this;
    }
};

/// Phase-space point z = (q, p) in R^6.
struct Phase {
    Vec3 q, p;

    Phase& operator+=(const Phase& o) { q += o.q; p += o.p; return *this; }
    Phase& operator-=(const Phase& o) { q -= o.q; p -= o.p; return *this; }
    Phase& operator*=(double s) { q *= s; p *= s; return *this; }
};

inline Phase operator+(Phase a, const Phase& b) { return a += b; }
inline Phase operator-(Phase a, const Phase& b) { return a -= b; }
inline Phase operator*(double s, Phase a) { return a *= s; }
inline double phase_norm(const Phase& z) { return std::sqrt(norm2(z.q) + norm2(z.p)); }
inline double phase_dist(const Phase& a, const Phase& b) { return phase_norm(a - b); }

} // namespace wavekin
