#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace roomtex {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct Vec2 {
    double x = 0, y = 0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
// z-component of the 3D cross product; positive when b is CCW from a.
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
inline Vec2 normalize(const Vec2& a) { return a / norm(a); }
// CCW perpendicular.
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

    Vec2 xz() const { return {x, z}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalize(const Vec3& a) { return a / norm(a); }

struct Vec4 {
    double x = 0, y = 0, z = 0, w = 0;

    Vec4() = default;
    Vec4(double x_, double y_, double z_, double w_) : x(x_), y(y_), z(z_), w(w_) {}
    Vec4(const Vec3& v, double w_) : x(v.x), y(v.y), z(v.z), w(w_) {}

    Vec3 xyz() const { return {x, y, z}; }
    Vec4 operator+(const Vec4& o) const { return {x + o.x, y + o.y, z + o.z, w + o.w}; }
    Vec4 operator-(const Vec4& o) const { return {x - o.x, y - o.y, z - o.z, w - o.w}; }
    Vec4 operator*(double s) const { return {x * s, y * s, z * s, w * s}; }
};

// Row-major 4x4 matrix; transforms column vectors (v' = M * v).
struct Mat4 {
    std::array<std::array<double, 4>, 4> m{};

    static Mat4 identity() {
        Mat4 r;
        for (int i = 0; i < 4; ++i) r.m[i][i] = 1.0;
        return r;
    }

    double* operator[](int r) { return m[r].data(); }
    const double* operator[](int r) const { return m[r].data(); }

    Mat4 operator*(const Mat4& o) const {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += m[i][k] * o.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }

    Vec4 operator*(const Vec4& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z + m[0][3] * v.w,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z + m[1][3] * v.w,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z + m[2][3] * v.w,
                m[3][0] * v.x + m[3][1] * v.y + m[3][2] * v.z + m[3][3] * v.w};
    }

    Vec3 transform_point(const Vec3& p) const {
        Vec4 r = (*this) * Vec4(p, 1.0);
        return r.xyz();
    }

    Vec3 transform_dir(const Vec3& d) const {
        Vec4 r = (*this) * Vec4(d, 0.0);
        return r.xyz();
    }

    Mat4 transposed() const {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.m[i][j] = m[j][i];
        return r;
    }
};

// Right-handed look-at view matrix (camera looks down its local -Z).
inline Mat4 look_at(const Vec3& eye, const Vec3& at, const Vec3& up) {
    Vec3 f = normalize(at - eye);
    Vec3 s = normalize(cross(f, up));
    Vec3 u = cross(s, f);
    Mat4 v = Mat4::identity();
    v[0][0] = s.x; v[0][1] = s.y; v[0][2] = s.z;
    v[1][0] = u.x; v[1][1] = u.y; v[1][2] = u.z;
    v[2][0] = -f.x; v[2][1] = -f.y; v[2][2] = -f.z;
    v[0][3] = -dot(s, eye);
    v[1][3] = -dot(u, eye);
    v[2][3] = dot(f, eye);
    return v;
}

// Inverse of a rigid transform (rotation + translation only).
inline Mat4 rigid_inverse(const Mat4& t) {
    Mat4 r = Mat4::identity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = t[j][i];
    Vec3 p{t[0][3], t[1][3], t[2][3]};
    Vec3 rp = r.transform_dir(p);
    r[0][3] = -rp.x;
    r[1][3] = -rp.y;
    r[2][3] = -rp.z;
    return r;
}

// General 4x4 inverse via Gauss-Jordan; throws on singular input.
inline Mat4 inverse(const Mat4& in) {
    std::array<std::array<double, 8>, 4> a{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) a[i][j] = in[i][j];
        a[i][4 + i] = 1.0;
    }
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) throw std::runtime_error("singular matrix");
        std::swap(a[piv], a[col]);
        double d = a[col][col];
        for (int j = 0; j < 8; ++j) a[col][j] /= d;
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            double f = a[r][col];
            if (f == 0.0) continue;
            for (int j = 0; j < 8; ++j) a[r][j] -= f * a[col][j];
        }
    }
    Mat4 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i][j] = a[i][4 + j];
    return out;
}

// In-place Gaussian elimination with partial pivoting for small dense systems
// (used by the homography DLT). Returns false on a singular system.
template <int N>
bool solve_linear(std::array<std::array<double, N + 1>, N>& a, std::array<double, N>& x) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-14) return false;
        std::swap(a[piv], a[col]);
        for (int r = col + 1; r < N; ++r) {
            double f = a[r][col] / a[col][col];
            for (int j = col; j <= N; ++j) a[r][j] -= f * a[col][j];
        }
    }
    for (int r = N - 1; r >= 0; --r) {
        double s = a[r][N];
        for (int j = r + 1; j < N; ++j) s -= a[r][j] * x[j];
        x[r] = s / a[r][r];
    }
    return true;
}

}  // namespace roomtex
