// Minimal 3-vector / 3x3-matrix arithmetic used across the library.
#pragma once

#include <array>
#include <cmath>

namespace zipform {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr bool operator==(const Vec3& o) const = default;

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    constexpr double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    Vec3 normalized() const { return *this / norm(); }

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Row-major 3x3 matrix.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static constexpr Mat3 identity() {
        return Mat3{{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}};
    }
    static constexpr Mat3 diagonal(double a, double b, double c) {
        return Mat3{{{{a, 0, 0}, {0, b, 0}, {0, 0, c}}}};
    }
    static constexpr Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        return Mat3{{{{r0.x, r0.y, r0.z}, {r1.x, r1.y, r1.z}, {r2.x, r2.y, r2.z}}}};
    }

    constexpr double operator()(int i, int j) const { return m[i][j]; }
    double& operator()(int i, int j) { return m[i][j]; }

    constexpr Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }

    constexpr Vec3 operator*(const Vec3& v) const {
        return {row(0).dot(v), row(1).dot(v), row(2).dot(v)};
    }
    constexpr Mat3 operator*(const Mat3& o) const {
        Mat3 r{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }
    constexpr bool operator==(const Mat3& o) const { return m == o.m; }

    constexpr Mat3 transpose() const {
        Mat3 r{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
    constexpr double det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

// Largest absolute entry of a - b.
inline double max_abs_diff(const Mat3& a, const Mat3& b) {
    double r = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r = std::max(r, std::fabs(a(i, j) - b(i, j)));
    return r;
}

inline bool is_orthogonal(const Mat3& r, double tol = 1e-9) {
    return max_abs_diff(r.transpose() * r, Mat3::identity()) <= tol;
}

}  // namespace zipform
