#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chorea/integrate.hpp"
#include "chorea/solver.hpp"

// Post-hoc verification of computed loops: equation-of-motion residuals,
// monotonicity and planarity structure, collision admissibility, binary
// collision asymptotics, and the continuous block-regularization matching
// conditions across a collision moment.

namespace chorea {

enum class Monotonicity { Constant, StrictMonotone, Violated };

inline const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Constant: return "Constant";
        case Monotonicity::StrictMonotone: return "StrictMonotone";
        case Monotonicity::Violated: return "Violated";
    }
    return "?";
}

struct PlaneFit {
    Vec3 normal;
    double residual = 0.0;          // max distance to plane / loop diameter
    bool xz_reflection_symmetric = false;
};

struct RegularizabilityReport;

struct DiagnosticsReport {
    double eom_residual = 0.0;
    Monotonicity monotone_x = Monotonicity::Violated;
    Monotonicity monotone_z = Monotonicity::Violated;
    PlaneFit planarity;
    CollisionReport collision;
    std::optional<std::pair<double, double>> sundman;  // (exponent, C1)
    std::shared_ptr<RegularizabilityReport> regularizability;  // set for collision candidates
    double boundary_violation = 0.0;
    std::string xi;
};

// Max node residual of the rotating equations of motion against the spectral
// second derivative, relative to the characteristic acceleration scale.
inline double eom_residual(const SampledLoop& sl, double omega, double floor = kDistanceFloor) {
    const int m = sl.m, n = sl.n;
    // spectral second derivatives per body and component
    std::vector<std::vector<Vec3>> acc(m, std::vector<Vec3>(n));
    std::vector<double> tr(m);
    for (int i = 0; i < n; ++i)
        for (int comp = 0; comp < 3; ++comp) {
            for (int k = 0; k < m; ++k) {
                const Vec3 p = sl.nodes[k].body(i);
                tr[k] = comp == 0 ? p.x : comp == 1 ? p.y : p.z;
            }
            const std::vector<double> d2 = spectral_derivative(spectral_derivative(tr));
            for (int k = 0; k < m; ++k)
                (comp == 0 ? acc[k][i].x : comp == 1 ? acc[k][i].y : acc[k][i].z) = d2[k];
        }
    SampledLoop work = sl;
    if (!work.has_velocities()) fill_velocities_spectral(work);
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < m; ++k) {
        const auto [azeta, az] = rotating_accel(work.nodes[k], work.vels[k], omega, floor);
        for (int i = 0; i < n; ++i) {
            const Vec3 rhs{azeta[i].real(), azeta[i].imag(), az[i]};
            worst = std::max(worst, norm(acc[k][i] - rhs));
            scale = std::max(scale, norm(rhs));
        }
    }
    return worst / std::max(scale, 1e-300);
}

// Sign structure of the generating body's x or z rate on (0, pi): constant,
// strictly monotone with turning points only at 0 and pi, or violated.
inline Monotonicity monotonicity_check(const SampledLoop& sl, char which, double tol_factor = 1e-6) {
    SampledLoop work = sl;
    if (!work.has_velocities()) fill_velocities_spectral(work);
    const int m = sl.m;
    std::vector<double> rate(m);
    double speed_scale = 0.0;
    for (int k = 0; k < m; ++k) {
        const Vec3 v = work.vels[k].body(0);
        rate[k] = (which == 'x') ? v.x : v.z;
        speed_scale = std::max(speed_scale, norm(v));
    }
    const double tol = tol_factor * std::max(speed_scale, 1e-300);
    double maxabs = 0.0;
    for (double r : rate) maxabs = std::max(maxabs, std::abs(r));
    if (maxabs < tol) return Monotonicity::Constant;
    // interior nodes of (0, pi): indices 1 .. m/2-1
    int sign = 0;
    for (int k = 1; k < m / 2; ++k) {
        if (std::abs(rate[k]) < tol) return Monotonicity::Violated;
        const int s = rate[k] > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        if (s != sign) return Monotonicity::Violated;
    }
    if (std::abs(rate[0]) > tol || std::abs(rate[m / 2]) > tol) return Monotonicity::Violated;
    return Monotonicity::StrictMonotone;
}

namespace detail {

// Jacobi eigen-decomposition of a symmetric 3x3 matrix; returns (values, vectors).
inline void jacobi3(std::array<std::array<double, 3>, 3> a, std::array<double, 3>& vals,
                    std::array<Vec3, 3>& vecs) {
    std::array<std::array<double, 3>, 3> v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        if (off < 1e-15) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a[p][q]) < 1e-18) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int r = 0; r < 3; ++r) {
                    const double arp = a[r][p], arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for (int r = 0; r < 3; ++r) {
                    const double apr = a[p][r], aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for (int r = 0; r < 3; ++r) {
                    const double vrp = v[r][p], vrq = v[r][q];
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
    }
    for (int i = 0; i < 3; ++i) {
        vals[i] = a[i][i];
        vecs[i] = {v[0][i], v[1][i], v[2][i]};
    }
}

}  // namespace detail

// Least-squares best-fit plane through the sampled generating curve.
inline PlaneFit planarity_check(const SampledLoop& sl) {
    const double diam = loop_diameter(sl);
    if (diam < 1e-10) throw DegenerateLoop("planarity_check: loop diameter below 1e-10");
    Vec3 mean{};
    for (int k = 0; k < sl.m; ++k) mean += sl.nodes[k].body(0);
    mean = (1.0 / sl.m) * mean;
    std::array<std::array<double, 3>, 3> cov{};
    for (int k = 0; k < sl.m; ++k) {
        const Vec3 d = sl.nodes[k].body(0) - mean;
        const double comp[3] = {d.x, d.y, d.z};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) cov[r][c] += comp[r] * comp[c];
    }
    std::array<double, 3> vals;
    std::array<Vec3, 3> vecs;
    detail::jacobi3(cov, vals, vecs);
    int lo = 0;
    for (int i = 1; i < 3; ++i)
        if (vals[i] < vals[lo]) lo = i;
    PlaneFit fit;
    fit.normal = vecs[lo];
    const double nn = norm(fit.normal);
    fit.normal = (1.0 / nn) * fit.normal;
    double worst = 0.0;
    for (int k = 0; k < sl.m; ++k)
        worst = std::max(worst, std::abs(dot(sl.nodes[k].body(0) - mean, fit.normal)));
    fit.residual = worst / diam;
    // plane invariant under the xz reflection: normal parallel or orthogonal to e_y
    const double ny = std::abs(fit.normal.y);
    fit.xz_reflection_symmetric = (ny < 1e-6) || (ny > 1.0 - 1e-6);
    return fit;
}

// log-log least-squares fit r ~ C1 t^alpha of one-sided collision samples.
inline std::pair<double, double> sundman_fit(const std::vector<double>& ts,
                                             const std::vector<double>& rs) {
    if (ts.size() != rs.size() || ts.size() < 3)
        throw InsufficientSamples("sundman_fit: need at least 3 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(ts.size());
    for (int i = 0; i < n; ++i) {
        if (ts[i] <= 0 || rs[i] <= 0) throw InsufficientSamples("sundman_fit: nonpositive sample");
        const double x = std::log(ts[i]), y = std::log(rs[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double inter = (sy - slope * sx) / n;
    return {slope, std::exp(inter)};
}

// Neville extrapolation of g(u) to u = 0 through the sample points.
inline double extrapolate_to_zero(std::vector<double> u, std::vector<double> g) {
    const int n = static_cast<int>(u.size());
    for (int level = 1; level < n; ++level)
        for (int i = 0; i < n - level; ++i)
            g[i] = g[i + 1] + (g[i + 1] - g[i]) * u[i + level] / (u[i] - u[i + level]);
    return g[0];
}

// One-sided dyadic samples of the colliding pair near the collision moment.
// Offsets decrease geometrically; rel = q_j - q_center.
struct CollisionSideSamples {
    std::vector<double> dt;
    std::vector<Vec3> rel, relvel;
    std::vector<Vec3> cen, cenvel;
};

struct AngleLimits {
    double phi = 0.0, theta = 0.0;
    double phidot = 0.0, thetadot = 0.0;
    double energy = 0.0;
    Vec3 center_velocity;
    double r_exponent = 0.0, r_C1 = 0.0;
};

inline AngleLimits collision_side_limits(const CollisionSideSamples& s) {
    const int n = static_cast<int>(s.dt.size());
    if (n < 3) throw InsufficientSamples("collision_side_limits: need at least 3 dyadic samples");
    std::vector<double> u(n), phi(n), theta(n), phidot(n), thetadot(n), energy(n), r(n);
    std::vector<double> cvx(n), cvy(n), cvz(n);
    double prev_theta = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec3 q = s.rel[i], v = s.relvel[i];
        const double rr = norm(q);
        r[i] = rr;
        const double rho2 = q.x * q.x + q.y * q.y;
        phi[i] = std::acos(std::max(-1.0, std::min(1.0, q.z / rr)));
        double th = std::atan2(q.y, q.x);
        if (i > 0) {  // unwrap
            while (th - prev_theta > kPi) th -= kTwoPi;
            while (th - prev_theta < -kPi) th += kTwoPi;
        }
        prev_theta = th;
        theta[i] = th;
        const double rdot = dot(q, v) / rr;
        const double sinphi = std::sqrt(std::max(rho2, 1e-300)) / rr;
        phidot[i] = (q.z * rdot - v.z * rr) / (rr * rr * sinphi);
        thetadot[i] = (q.x * v.y - q.y * v.x) / std::max(rho2, 1e-300);
        energy[i] = std::norm(Cplx{s.cenvel[i].x, s.cenvel[i].y}) + s.cenvel[i].z * s.cenvel[i].z +
                    dot(v, v) - 1.0 / (2.0 * rr);
        cvx[i] = s.cenvel[i].x;
        cvy[i] = s.cenvel[i].y;
        cvz[i] = s.cenvel[i].z;
        u[i] = std::cbrt(s.dt[i] * s.dt[i]);  // t^(2/3), the natural small parameter
    }
    AngleLimits out;
    out.phi = extrapolate_to_zero(u, phi);
    out.theta = extrapolate_to_zero(u, theta);
    out.phidot = extrapolate_to_zero(u, phidot);
    out.thetadot = extrapolate_to_zero(u, thetadot);
    out.energy = extrapolate_to_zero(u, energy);
    out.center_velocity = {extrapolate_to_zero(u, cvx), extrapolate_to_zero(u, cvy),
                           extrapolate_to_zero(u, cvz)};
    const auto [expn, c1] = sundman_fit(s.dt, r);
    out.r_exponent = expn;
    out.r_C1 = c1;
    return out;
}

struct RegularizabilityReport {
    AngleLimits before, after;
    double dphi = 0.0;
    double dtheta_mod = 0.0;
    double dE = 0.0;
    double E_scale = 1.0;
    double center_c1_residual = 0.0;
    bool pass = false;
};

// The three matching conditions for continuous block-regularization of a
// binary collision, plus the C^1 center-of-mass check. Limits are taken by
// extrapolation toward the collision moment on both sides.
inline RegularizabilityReport regularizability_check(const CollisionSideSamples& before,
                                                     const CollisionSideSamples& after,
                                                     double tol = 1e-3) {
    RegularizabilityReport rep;
    rep.before = collision_side_limits(before);
    rep.after = collision_side_limits(after);
    rep.dphi = std::abs(rep.before.phi - rep.after.phi);
    double dth = std::fmod(rep.before.theta - rep.after.theta, kTwoPi);
    if (dth > kPi) dth -= kTwoPi;
    if (dth < -kPi) dth += kTwoPi;
    rep.dtheta_mod = std::abs(dth);
    rep.dE = std::abs(rep.before.energy - rep.after.energy);
    rep.E_scale = std::max(1.0, 0.5 * (std::abs(rep.before.energy) + std::abs(rep.after.energy)));
    rep.center_c1_residual = norm(rep.before.center_velocity - rep.after.center_velocity);
    const double cscale = std::max(1.0, norm(rep.before.center_velocity));
    rep.pass = rep.dphi < tol && rep.dtheta_mod < tol && std::abs(rep.before.phidot) < tol &&
               std::abs(rep.after.phidot) < tol && std::abs(rep.before.thetadot) < tol &&
               std::abs(rep.after.thetadot) < tol && rep.dE < tol * rep.E_scale &&
               rep.center_c1_residual < tol * cscale;
    return rep;
}

// Extract one-sided dyadic samples for pair (j, k) around a collision moment
// of a (near-)collision loop by integrating the equations of motion inward
// from the nearest clean nodes; works in the inertial frame.
inline CollisionSideSamples refine_collision_samples(const SampledLoop& rotating_loop,
                                                     double omega_frame, double t0, int j, int k,
                                                     bool after_side, int levels = 7,
                                                     double h0 = -1.0) {
    SampledLoop work = rotating_loop;
    if (!work.has_velocities()) fill_velocities_spectral(work);
    const SampledLoop inertial = loop_to_inertial(work, omega_frame);
    const int m = inertial.m;
    // start from a clean node a few grid steps away on the requested side
    const double node_dt = kTwoPi / m;
    if (h0 <= 0) h0 = 8 * node_dt;
    h0 = std::max(1.0, std::round(h0 / node_dt)) * node_dt;
    const double tstart = after_side ? t0 + h0 : t0 - h0;
    const double tgrid = std::fmod(tstart + 2.0 * kTwoPi, kTwoPi);
    const int node = static_cast<int>(std::llround(tgrid / node_dt)) % m;
    BodyState cur{inertial.nodes[node], inertial.vels[node]};

    CollisionSideSamples out;
    double dt = h0;
    double tcur = tstart;
    for (int lvl = 0; lvl < levels; ++lvl) {
        const double ttarget = after_side ? t0 + dt : t0 - dt;
        cur = integrate_rotating(cur, tcur, ttarget, 0.0, 1e-12, 1e-12);
        tcur = ttarget;
        const Vec3 qj = cur.q.body(j), qk = cur.q.body(k);
        const Vec3 vj = cur.v.body(j), vk = cur.v.body(k);
        out.dt.push_back(dt);
        out.rel.push_back(0.5 * (qj - qk));
        out.relvel.push_back(0.5 * (vj - vk));
        out.cen.push_back(0.5 * (qj + qk));
        out.cenvel.push_back(0.5 * (vj + vk));
        dt *= 0.5;
    }
    return out;
}

// Loop-level form: refines both one-sided limits of the pair (j, k) around a
// collision moment of the rotating-frame loop (working inertially) and checks
// the matching conditions.
inline RegularizabilityReport regularizability_check(const SampledLoop& rotating_loop,
                                                     double omega_frame, double t0, int j, int k,
                                                     double tol = 1e-3) {
    const CollisionSideSamples before =
        refine_collision_samples(rotating_loop, omega_frame, t0, j, k, /*after=*/false);
    const CollisionSideSamples after =
        refine_collision_samples(rotating_loop, omega_frame, t0, j, k, /*after=*/true);
    return regularizability_check(before, after, tol);
}

// Reintegrates the sampled initial conditions over a full period and reports
// the closure error relative to the loop diameter.
inline double reintegration_closure(const SampledLoop& sl, double omega) {
    SampledLoop work = sl;
    if (!work.has_velocities()) fill_velocities_spectral(work);
    BodyState s0{work.nodes[0], work.vels[0]};
    const BodyState s1 = integrate_rotating(s0, 0.0, kTwoPi, omega, 1e-12, 1e-13);
    double err = 0.0;
    for (int i = 0; i < sl.n; ++i) {
        err = std::max(err, norm(s1.q.body(i) - s0.q.body(i)));
        err = std::max(err, norm(s1.v.body(i) - s0.v.body(i)));
    }
    return err / std::max(loop_diameter(sl), 1e-300);
}

inline DiagnosticsReport run_diagnostics(const SampledLoop& sl, double omega,
                                         double collision_dist = 1e-4) {
    DiagnosticsReport rep;
    rep.eom_residual = eom_residual(sl, omega);
    rep.monotone_x = monotonicity_check(sl, 'x');
    rep.monotone_z = monotonicity_check(sl, 'z');
    rep.planarity = planarity_check(sl);
    rep.collision = collision_monitor(sl, collision_dist);
    rep.boundary_violation =
        boundary_violation(sl, boundary_conditions(SymmetryClass(sl.n, SymmetryKind::DN)));
    const auto cls = classify(sl);
    rep.xi = cls ? cls->str() : "degenerate";
    // admissible checkpoint collisions additionally get the matching-condition
    // and asymptotics analysis of the refined one-sided limits
    for (const auto& ev : rep.collision.events) {
        if (!ev.at_checkpoint || !ev.allowed) continue;
        try {
            rep.regularizability = std::make_shared<RegularizabilityReport>(
                regularizability_check(sl, omega, ev.t, ev.i, ev.j));
            rep.sundman = {rep.regularizability->before.r_exponent,
                           rep.regularizability->before.r_C1};
        } catch (const std::exception&) {
        }
        break;
    }
    return rep;
}

}  // namespace chorea
