#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "chorea/common.hpp"

// Configurations, gravitational potential and forces, the rotating-frame
// equations of motion and the frame transform. All masses are 1.

namespace chorea {

// Positions of n bodies, split into horizontal complex and vertical real parts:
// q_i = (zeta_i, z_i) with zeta_i = x_i + J*y_i.
struct Configuration {
    int n = 0;
    std::vector<Cplx> zeta;
    std::vector<double> z;

    Configuration() = default;
    explicit Configuration(int n_) : n(n_), zeta(n_, Cplx{0.0, 0.0}), z(n_, 0.0) {}

    Vec3 body(int i) const { return {zeta[i].real(), zeta[i].imag(), z[i]}; }
    void set_body(int i, const Vec3& p) {
        zeta[i] = Cplx{p.x, p.y};
        z[i] = p.z;
    }
};

struct Velocity {
    int n = 0;
    std::vector<Cplx> dzeta;
    std::vector<double> dz;

    Velocity() = default;
    explicit Velocity(int n_) : n(n_), dzeta(n_, Cplx{0.0, 0.0}), dz(n_, 0.0) {}

    Vec3 body(int i) const { return {dzeta[i].real(), dzeta[i].imag(), dz[i]}; }
    void set_body(int i, const Vec3& v) {
        dzeta[i] = Cplx{v.x, v.y};
        dz[i] = v.z;
    }
};

// Energy of the two-body sub-system {j, k}.
struct PairEnergy {
    int j = 0, k = 0;
    double value = 0.0;
};

inline double body_distance(const Configuration& c, int i, int j) {
    const Cplx dzeta = c.zeta[i] - c.zeta[j];
    const double dz = c.z[i] - c.z[j];
    return std::sqrt(std::norm(dzeta) + dz * dz);
}

// U(q) = sum_{i<j} 1/|q_i - q_j|  (negative potential energy, always positive).
inline double potential(const Configuration& c, double floor = kDistanceFloor) {
    double u = 0.0;
    for (int i = 0; i < c.n; ++i)
        for (int j = i + 1; j < c.n; ++j) {
            const double d = body_distance(c, i, j);
            if (d < floor)
                throw CollisionSingularity("potential: bodies " + std::to_string(i) + "," +
                                               std::to_string(j) + " closer than floor",
                                           -1, i, j);
            u += 1.0 / d;
        }
    return u;
}

// dU/dq_i = -sum_{j != i} (q_i - q_j)/|q_i - q_j|^3, returned per body.
// This equals the acceleration of body i in the inertial frame.
inline std::vector<Vec3> force(const Configuration& c, double floor = kDistanceFloor) {
    std::vector<Vec3> f(c.n);
    for (int i = 0; i < c.n; ++i)
        for (int j = i + 1; j < c.n; ++j) {
            const Vec3 d = c.body(i) - c.body(j);
            const double r = norm(d);
            if (r < floor)
                throw CollisionSingularity("force: bodies " + std::to_string(i) + "," +
                                               std::to_string(j) + " closer than floor",
                                           -1, i, j);
            const Vec3 g = (1.0 / (r * r * r)) * d;
            f[i] += -1.0 * g;
            f[j] += g;
        }
    return f;
}

// Right-hand side of the equations of motion in a frame rotating about the
// z-axis with angular velocity omega:
//   dd(zeta_i) = omega^2 zeta_i - 2 omega J d(zeta_i) + dU/dzeta_i
//   dd(z_i)    = dU/dz_i
// The Coriolis term uses the velocity d(zeta_i); see coriolis_form_discrepancy.
inline std::pair<std::vector<Cplx>, std::vector<double>> rotating_accel(
    const Configuration& c, const Velocity& v, double omega, double floor = kDistanceFloor) {
    const std::vector<Vec3> f = force(c, floor);
    std::vector<Cplx> az(c.n);
    std::vector<double> avert(c.n);
    const Cplx J{0.0, 1.0};
    for (int i = 0; i < c.n; ++i) {
        az[i] = omega * omega * c.zeta[i] - 2.0 * omega * J * v.dzeta[i] + Cplx{f[i].x, f[i].y};
        avert[i] = f[i].z;
    }
    return {az, avert};
}

// Difference between the velocity-based Coriolis term and the literal
// position-based form; nonzero whenever omega != 0 and d(zeta) != zeta.
inline double coriolis_form_discrepancy(const Configuration& c, const Velocity& v, double omega) {
    double s = 0.0;
    for (int i = 0; i < c.n; ++i) s += std::norm(2.0 * omega * (v.dzeta[i] - c.zeta[i]));
    return std::sqrt(s);
}

// Same path seen in the non-rotating frame: zeta_i -> e^{J omega t} zeta_i.
inline Configuration to_inertial(const Configuration& c, double t, double omega) {
    Configuration out = c;
    const Cplx phase = std::exp(Cplx{0.0, omega * t});
    for (int i = 0; i < c.n; ++i) out.zeta[i] = phase * c.zeta[i];
    return out;
}

inline PairEnergy pair_energy(const Configuration& c, const Velocity& v, int j, int k,
                              double floor = kDistanceFloor) {
    if (j == k) throw PreconditionViolated("pair_energy: j == k");
    const double d = body_distance(c, j, k);
    if (d < floor)
        throw CollisionSingularity("pair_energy: coincident bodies", -1, j, k);
    const double kin = 0.5 * (std::norm(v.dzeta[j]) + v.dz[j] * v.dz[j] +
                              std::norm(v.dzeta[k]) + v.dz[k] * v.dz[k]);
    return {j, k, kin - 1.0 / d};
}

inline double min_pair_distance(const Configuration& c) {
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < c.n; ++i)
        for (int j = i + 1; j < c.n; ++j) dmin = std::min(dmin, body_distance(c, i, j));
    return dmin;
}

}  // namespace chorea
