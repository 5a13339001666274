#pragma once

#include <cmath>
#include <complex>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace chorea {

using Cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Pairwise distances below this floor raise CollisionSingularity.
inline constexpr double kDistanceFloor = 1e-12;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a.x += b.x; a.y += b.y; a.z += b.z; return a; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

// Column-major is irrelevant here: row i of m is m[i].
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }
    // reflection with respect to the xz-plane (y -> -y)
    static Mat3 reflect_xz() {
        Mat3 r = identity();
        r.m[1][1] = -1.0;
        return r;
    }
    // rotation by pi around the x-axis (y -> -y, z -> -z)
    static Mat3 rotate_pi_x() {
        Mat3 r = identity();
        r.m[1][1] = -1.0;
        r.m[2][2] = -1.0;
        return r;
    }
    // rotation by angle around the z-axis
    static Mat3 rotate_z(double angle) {
        Mat3 r;
        const double c = std::cos(angle), s = std::sin(angle);
        r.m[0][0] = c; r.m[0][1] = -s;
        r.m[1][0] = s; r.m[1][1] = c;
        r.m[2][2] = 1.0;
        return r;
    }
    // rotation by angle around the y-axis
    static Mat3 rotate_y(double angle) {
        Mat3 r;
        const double c = std::cos(angle), s = std::sin(angle);
        r.m[0][0] = c; r.m[0][2] = s;
        r.m[1][1] = 1.0;
        r.m[2][0] = -s; r.m[2][2] = c;
        return r;
    }
};

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
            a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
            a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
}

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

struct CollisionSingularity : std::runtime_error {
    int node = -1;
    int body_i = -1, body_j = -1;
    CollisionSingularity(std::string msg, int node_ = -1, int i = -1, int j = -1)
        : std::runtime_error(std::move(msg)), node(node_), body_i(i), body_j(j) {}
};

struct GridNotClosed : std::runtime_error { using std::runtime_error::runtime_error; };
struct GridNotDivisible : std::runtime_error { using std::runtime_error::runtime_error; };
struct BoundaryMismatch : std::runtime_error { using std::runtime_error::runtime_error; };
struct PreconditionViolated : std::runtime_error { using std::runtime_error::runtime_error; };
struct InfeasiblePattern : std::runtime_error { using std::runtime_error::runtime_error; };
struct OmegaEqualsK : std::runtime_error { using std::runtime_error::runtime_error; };
struct InsufficientSamples : std::runtime_error { using std::runtime_error::runtime_error; };
struct NotIsolated : std::runtime_error { using std::runtime_error::runtime_error; };
struct AmbiguousPairing : std::runtime_error { using std::runtime_error::runtime_error; };
struct DegenerateLoop : std::runtime_error { using std::runtime_error::runtime_error; };
struct ConfigError : std::runtime_error { using std::runtime_error::runtime_error; };

inline long long gcd_ll(long long a, long long b) {
    while (b != 0) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

// Dense Gaussian elimination with partial pivoting for the small interpolation
// systems used by seeds and fits.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a,
                                        std::vector<double> rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-14) throw std::runtime_error("solve_linear: singular system");
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace chorea
