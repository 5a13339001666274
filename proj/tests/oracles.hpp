#pragma once

#include <functional>
#include <random>

#include "chorea/chorea.hpp"

// Independent oracles used by the test suite: plain quadrature of the
// rotating kinetic integrand, finite differences of the action and the
// potential, closed-form rectilinear Kepler arcs, and seeded random inputs.
// Everything here is deliberately written against the definitions, not
// against the library's coefficient-space formulas.

namespace oracles {

using namespace chorea;

// --- quadrature of the rotating kinetic norm, term-by-term trig evaluation --
inline double quad_kinetic_omega(const FourierLoop& fl, double omega, int m) {
    const int n = fl.sym.n;
    double total = 0.0;
    for (int node = 0; node < m; ++node) {
        const double t = kTwoPi * node / m;
        for (int i = 0; i < n; ++i) {
            const double ti = t + kTwoPi * i / n;
            const Vec3 p = fl.eval(ti);
            const Vec3 v = fl.eval_velocity(ti);
            // |d(zeta) + J omega zeta|^2 = (xd - omega y)^2 + (yd + omega x)^2
            const double h1 = v.x - omega * p.y;
            const double h2 = v.y + omega * p.x;
            total += h1 * h1 + h2 * h2 + v.z * v.z;
        }
    }
    return total * kTwoPi / m;
}

// --- central finite differences ---------------------------------------------
inline std::vector<Vec3> fd_force(const Configuration& c, double h = 1e-6) {
    std::vector<Vec3> g(c.n);
    for (int i = 0; i < c.n; ++i) {
        for (int comp = 0; comp < 3; ++comp) {
            Configuration cp = c, cm = c;
            Vec3 pp = c.body(i), pm = c.body(i);
            (comp == 0 ? pp.x : comp == 1 ? pp.y : pp.z) += h;
            (comp == 0 ? pm.x : comp == 1 ? pm.y : pm.z) -= h;
            cp.set_body(i, pp);
            cm.set_body(i, pm);
            const double d = (potential(cp) - potential(cm)) / (2 * h);
            (comp == 0 ? g[i].x : comp == 1 ? g[i].y : g[i].z) = d;
        }
    }
    return g;
}

inline Gradient fd_action_gradient(const FourierLoop& fl, double omega, int m, double h = 1e-5) {
    Gradient g(fl.order);
    auto bump = [&](std::vector<double> FourierLoop::*arr, int k, double delta) {
        FourierLoop c = fl;
        (c.*arr)[k] += delta;
        return action_omega(c, omega, m).total;
    };
    for (int k = 0; k <= fl.order; ++k) {
        g.a[k] = (bump(&FourierLoop::a, k, h) - bump(&FourierLoop::a, k, -h)) / (2 * h);
        if (k >= 1) g.b[k] = (bump(&FourierLoop::b, k, h) - bump(&FourierLoop::b, k, -h)) / (2 * h);
        g.c[k] = (bump(&FourierLoop::c, k, h) - bump(&FourierLoop::c, k, -h)) / (2 * h);
    }
    return g;
}

// --- random inputs -----------------------------------------------------------
inline Configuration random_separated_config(std::mt19937& rng, int n, double box = 3.0,
                                             double min_dist = 0.4) {
    std::uniform_real_distribution<double> u(-box, box);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Configuration c(n);
        for (int i = 0; i < n; ++i) c.set_body(i, {u(rng), u(rng), u(rng)});
        if (min_pair_distance(c) > min_dist) return c;
    }
    throw std::runtime_error("random_separated_config: rejection failed");
}

// Random loop around a well-separated base choreography circle; collision-free
// for the decays and amplitudes used in the tests.
inline FourierLoop random_loop(std::mt19937& rng, const SymmetryClass& sym, int order,
                               double amplitude = 0.3, double base_radius = 2.5) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FourierLoop fl(sym, order);
    for (int k = 1; k <= order; ++k) {
        const double w = amplitude / (k * k);
        fl.a[k] = w * u(rng);
        fl.b[k] = w * u(rng);
        fl.c[k] = w * u(rng);
    }
    fl.b[1] += base_radius;  // big horizontal bubble keeps the bodies apart
    fl.a[1] += base_radius;
    return project(fl);
}

// --- rectilinear Kepler arcs -------------------------------------------------
// Separation of the zero-energy parabolic collision arc of two unit masses.
inline double parabolic_separation(double t) { return std::cbrt(9.0) * std::pow(t, 2.0 / 3.0); }
inline double parabolic_separation_rate(double t) {
    return std::cbrt(9.0) * (2.0 / 3.0) * std::pow(t, -1.0 / 3.0);
}

// time to reach separation r from collision for pair energy E0 (per the
// sub-system energy = rdot^2/4 - 1/r): t(r) = int_0^r drho / (2 sqrt(E0 + 1/rho)).
inline double kepler_energy_time_of_sep(double E0, double r) {
    // substitute rho = s^2: integrand s^2 / sqrt(E0 s^2 + 1), Simpson rule
    const int panels = 4000;
    const double smax = std::sqrt(r);
    auto f = [&](double s) { return s * s / std::sqrt(E0 * s * s + 1.0); };
    double acc = f(0.0) + f(smax);
    for (int i = 1; i < panels; ++i) {
        const double s = smax * i / panels;
        acc += f(s) * (i % 2 ? 4.0 : 2.0);
    }
    return acc * (smax / panels) / 3.0;
}

inline double kepler_energy_sep_of_time(double E0, double t) {
    double lo = 0.0, hi = 1.0;
    while (kepler_energy_time_of_sep(E0, hi) < t) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (kepler_energy_time_of_sep(E0, mid) < t ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double kepler_energy_rate_of_sep(double E0, double r) {
    return 2.0 * std::sqrt(E0 + 1.0 / r);
}

// --- constructed collision paths for the deformation suite -------------------
// Pair approaching a binary collision at t=0 along direction `dir` (unit),
// center fixed at `center`, plus optional static spectators. Graded time grid
// t = T (m/M)^3 starting at m=1 keeps every node finite.
struct PairPathSpec {
    Vec3 center{0, 0, 0};
    Vec3 dir{0, 1, 0};
    double T = 1.0;
    int samples = 4000;
    std::vector<Vec3> spectators;
};

inline SampledPath build_pair_collision_path(const PairPathSpec& spec) {
    SampledPath p;
    const int n = 2 + static_cast<int>(spec.spectators.size());
    for (int msel = 1; msel <= spec.samples; ++msel) {
        const double frac = double(msel) / spec.samples;
        const double t = spec.T * frac * frac * frac;
        const double sep = parabolic_separation(t);
        const double rate = parabolic_separation_rate(t);
        Configuration c(n);
        Velocity v(n);
        c.set_body(0, spec.center + (0.5 * sep) * spec.dir);
        c.set_body(1, spec.center - (0.5 * sep) * spec.dir);
        v.set_body(0, (0.5 * rate) * spec.dir);
        v.set_body(1, (-0.5 * rate) * spec.dir);
        for (size_t s = 0; s < spec.spectators.size(); ++s)
            c.set_body(2 + static_cast<int>(s), spec.spectators[s]);
        p.ts.push_back(t);
        p.nodes.push_back(std::move(c));
        p.vels.push_back(std::move(v));
    }
    return p;
}

// --- dyadic side samples from closed forms -----------------------------------
struct ArcSpec {
    double theta = kPi / 2;
    double phi = kPi / 2;
    double E0 = 0.0;            // sub-system energy of the arc
    double phidot = 0.0;        // artificial polar rate (violation construction)
    Vec3 center_vel{0, 0, 0};
};

inline CollisionSideSamples closed_form_side(const ArcSpec& arc, bool after, double h0 = 0.05,
                                             int levels = 7) {
    CollisionSideSamples s;
    double dt = h0;
    for (int l = 0; l < levels; ++l) {
        const double sep = (arc.E0 == 0.0) ? parabolic_separation(dt)
                                           : kepler_energy_sep_of_time(arc.E0, dt);
        const double rate = (arc.E0 == 0.0) ? parabolic_separation_rate(dt)
                                            : kepler_energy_rate_of_sep(arc.E0, sep);
        const double phi = arc.phi + arc.phidot * dt;
        const Vec3 u{std::sin(phi) * std::cos(arc.theta), std::sin(phi) * std::sin(arc.theta),
                     std::cos(phi)};
        const Vec3 du{std::cos(phi) * std::cos(arc.theta) * arc.phidot,
                      std::cos(phi) * std::sin(arc.theta) * arc.phidot,
                      -std::sin(phi) * arc.phidot};
        const double sgn = after ? 1.0 : -1.0;
        s.dt.push_back(dt);
        s.rel.push_back((0.5 * sep) * u);
        // d/dt of (sep(|t|)/2) u(|t|) evaluated from the requested side
        s.relvel.push_back(sgn * ((0.5 * rate) * u + (0.5 * sep) * du));
        s.cen.push_back((sgn * dt) * arc.center_vel);
        s.cenvel.push_back(arc.center_vel);
        dt *= 0.5;
    }
    return s;
}

}  // namespace oracles
