#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "chorea/nbody.hpp"

// Explicit deformations of collision paths on [0, T]: the vertical bridge
// construction for a z-separated binary collision, and the out-of-plane lift
// of a planar cluster collision. Both strictly decrease the rotating-frame
// action for small epsilon.

namespace chorea {

// A finite path segment sampled at monotone (not necessarily uniform) times.
struct SampledPath {
    std::vector<double> ts;
    std::vector<Configuration> nodes;
    std::vector<Velocity> vels;

    int size() const { return static_cast<int>(ts.size()); }
    int bodies() const { return nodes.empty() ? 0 : nodes.front().n; }
    double duration() const { return ts.empty() ? 0.0 : ts.back() - ts.front(); }
};

enum class DeformKind { Dfm2, Dfm4 };

enum class DeformAxis { E1, E3 };

struct DeformationSpec {
    DeformKind kind = DeformKind::Dfm2;
    double epsilon = 1e-2;

    // Dfm2: collision pair (j, k) with q_j moving to the positive side, and the
    // spectator partition (lower cluster, upper cluster).
    int j = 0, k = 1;
    std::vector<int> lower, upper;
    DeformAxis axis = DeformAxis::E3;  // E1 admissible only for omega = 0 comparisons

    // Dfm4: per-body vertical signs tau_i in {0, +-1}; at least two colliding
    // bodies must receive different values and non-colliding bodies zero.
    std::vector<int> tau;
    std::vector<int> cluster;  // the colliding index cluster I
};

namespace detail {

inline double axis_coord(const Vec3& p, DeformAxis ax) { return ax == DeformAxis::E1 ? p.x : p.z; }

inline Vec3 axis_vec(DeformAxis ax, double v) {
    return ax == DeformAxis::E1 ? Vec3{v, 0.0, 0.0} : Vec3{0.0, 0.0, v};
}

// cubic smoothstep profile: 1 on [0, d1], 0 on [d2, T], decreasing between
inline double lift_profile(double t, double d1, double d2) {
    if (t <= d1) return 1.0;
    if (t >= d2) return 0.0;
    const double u = (t - d1) / (d2 - d1);
    return 1.0 - u * u * (3.0 - 2.0 * u);
}

inline double lift_profile_rate(double t, double d1, double d2) {
    if (t <= d1 || t >= d2) return 0.0;
    const double u = (t - d1) / (d2 - d1);
    return -6.0 * u * (1.0 - u) / (d2 - d1);
}

}  // namespace detail

// Separation structure per the deformation preconditions: the pair brackets
// the spectator clusters along the axis on the whole path.
inline void check_separated(const SampledPath& p, const DeformationSpec& spec, double tol) {
    const int m = p.size();
    const DeformAxis ax = spec.axis;
    const double cj0 = detail::axis_coord(p.nodes[0].body(spec.j), ax);
    const double ck0 = detail::axis_coord(p.nodes[0].body(spec.k), ax);
    if (std::abs(cj0 - ck0) > tol)
        throw PreconditionViolated("deform: pair not matched at t=0 along the axis");
    const double cjT = detail::axis_coord(p.nodes[m - 1].body(spec.j), ax);
    const double ckT = detail::axis_coord(p.nodes[m - 1].body(spec.k), ax);
    if (!(cjT > ckT))
        throw PreconditionViolated("deform: need coordinate_j(T) > coordinate_k(T)");
    for (int s = 0; s < m; ++s) {
        const double cj = detail::axis_coord(p.nodes[s].body(spec.j), ax);
        const double ck = detail::axis_coord(p.nodes[s].body(spec.k), ax);
        if (cj < cj0 - tol || cj > cjT + tol || ck > ck0 + tol || ck < ckT - tol)
            throw PreconditionViolated("deform: pair coordinates not monotonically separated");
        for (int i : spec.lower)
            if (detail::axis_coord(p.nodes[s].body(i), ax) > ckT + tol)
                throw PreconditionViolated("deform: lower cluster body " + std::to_string(i) +
                                           " above coordinate_k(T)");
        for (int i : spec.upper)
            if (detail::axis_coord(p.nodes[s].body(i), ax) < cjT - tol)
                throw PreconditionViolated("deform: upper cluster body " + std::to_string(i) +
                                           " below coordinate_j(T)");
    }
}

inline void check_planar(const SampledPath& p, double tol) {
    double zmin = 1e300, zmax = -1e300;
    for (const auto& c : p.nodes)
        for (int i = 0; i < c.n; ++i) {
            zmin = std::min(zmin, c.z[i]);
            zmax = std::max(zmax, c.z[i]);
        }
    if (zmax - zmin > tol)
        throw PreconditionViolated("deform: path not contained in a plane parallel to the xy-plane");
}

inline SampledPath deform(const SampledPath& p, const DeformationSpec& spec, double tol = 1e-8) {
    SampledPath out = p;
    const int m = p.size();
    const double eps = spec.epsilon;
    if (eps <= 0.0) throw PreconditionViolated("deform: epsilon must be positive");

    if (spec.kind == DeformKind::Dfm2) {
        check_separated(p, spec, tol);
        const double d0 = body_distance(p.nodes[0], spec.j, spec.k);
        if (d0 > tol)
            throw PreconditionViolated("deform: pair (j,k) does not collide at t=0");
        for (int s = 0; s < m; ++s) {
            const double t = p.ts[s] - p.ts[0];
            // pair bridge t(2 eps - t) on [0, eps], eps^2 afterwards
            const double bridge = (t <= eps) ? t * (2.0 * eps - t) : eps * eps;
            const double rate = (t <= eps) ? 2.0 * (eps - t) : 0.0;
            auto shift = [&](int body, double amount, double vrate) {
                Vec3 q = out.nodes[s].body(body);
                q += detail::axis_vec(spec.axis, amount);
                out.nodes[s].set_body(body, q);
                if (!out.vels.empty()) {
                    Vec3 v = out.vels[s].body(body);
                    v += detail::axis_vec(spec.axis, vrate);
                    out.vels[s].set_body(body, v);
                }
            };
            shift(spec.j, bridge, rate);
            shift(spec.k, -bridge, -rate);
            for (int i : spec.lower) shift(i, -eps * eps, 0.0);
            for (int i : spec.upper) shift(i, eps * eps, 0.0);
        }
    } else {
        check_planar(p, tol);
        if (static_cast<int>(spec.tau.size()) != p.bodies())
            throw PreconditionViolated("deform: tau size mismatch");
        bool differs = false;
        for (int i0 : spec.cluster)
            for (int i1 : spec.cluster)
                if (spec.tau[i0] != spec.tau[i1]) differs = true;
        if (!differs)
            throw PreconditionViolated("deform: tau must differ on two colliding bodies");
        for (size_t i = 0; i < spec.tau.size(); ++i) {
            const bool in_cluster =
                std::find(spec.cluster.begin(), spec.cluster.end(), static_cast<int>(i)) !=
                spec.cluster.end();
            if (!in_cluster && spec.tau[i] != 0)
                throw PreconditionViolated("deform: tau must vanish outside the collision cluster");
            if (spec.tau[i] < -1 || spec.tau[i] > 1)
                throw PreconditionViolated("deform: tau entries must lie in {0,+-1}");
        }
        const double d1 = eps * eps;
        const double d2 = eps;
        for (int s = 0; s < m; ++s) {
            const double t = p.ts[s] - p.ts[0];
            const double f = detail::lift_profile(t, d1, d2);
            const double fr = detail::lift_profile_rate(t, d1, d2);
            for (int i = 0; i < p.bodies(); ++i) {
                if (spec.tau[i] == 0) continue;
                Vec3 q = out.nodes[s].body(i);
                q.z += eps * f * spec.tau[i];
                out.nodes[s].set_body(i, q);
                if (!out.vels.empty()) {
                    Vec3 v = out.vels[s].body(i);
                    v.z += eps * fr * spec.tau[i];
                    out.vels[s].set_body(i, v);
                }
            }
        }
    }
    return out;
}

// Trapezoid action of a collision-free path (throws on singular nodes).
inline double path_action_omega(const SampledPath& p, double omega,
                                double floor = kDistanceFloor) {
    const Cplx J{0.0, 1.0};
    const int m = p.size();
    std::vector<double> lag(m);
    for (int s = 0; s < m; ++s) {
        double kin = 0.0;
        for (int i = 0; i < p.bodies(); ++i) {
            kin += std::norm(p.vels[s].dzeta[i] + J * omega * p.nodes[s].zeta[i]);
            kin += p.vels[s].dz[i] * p.vels[s].dz[i];
        }
        lag[s] = 0.5 * kin + potential(p.nodes[s], floor);
    }
    double a = 0.0;
    for (int s = 0; s + 1 < m; ++s) a += 0.5 * (lag[s] + lag[s + 1]) * (p.ts[s + 1] - p.ts[s]);
    return a;
}

// A_omega(b) - A_omega(a) for two paths on the same time grid, evaluated as a
// quadrature of the integrand difference. Pairs that are singular in both
// paths at a node cancel exactly, so endpoint collisions shared by the two
// paths do not pollute the comparison.
inline double path_action_difference(const SampledPath& a, const SampledPath& b, double omega,
                                     double floor = kDistanceFloor) {
    if (a.size() != b.size() || a.bodies() != b.bodies())
        throw PreconditionViolated("path_action_difference: mismatched paths");
    const Cplx J{0.0, 1.0};
    const int m = a.size();
    const int n = a.bodies();
    std::vector<double> diff(m);
    for (int s = 0; s < m; ++s) {
        double d = 0.0;
        for (int i = 0; i < n; ++i) {
            d += 0.5 * (std::norm(b.vels[s].dzeta[i] + J * omega * b.nodes[s].zeta[i]) -
                        std::norm(a.vels[s].dzeta[i] + J * omega * a.nodes[s].zeta[i]));
            d += 0.5 * (b.vels[s].dz[i] * b.vels[s].dz[i] - a.vels[s].dz[i] * a.vels[s].dz[i]);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double da = body_distance(a.nodes[s], i, j);
                const double db = body_distance(b.nodes[s], i, j);
                if (da < floor && db < floor) continue;  // shared singular pair
                d += 1.0 / db - 1.0 / da;
            }
        diff[s] = d;
    }
    double out = 0.0;
    for (int s = 0; s + 1 < m; ++s) out += 0.5 * (diff[s] + diff[s + 1]) * (a.ts[s + 1] - a.ts[s]);
    return out;
}

}  // namespace chorea
